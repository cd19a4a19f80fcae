#include <cmath>

#include "doctest.h"
#include "dht/arc_forms.hpp"
#include "dht/expurgated.hpp"
#include "dht/rc_exponents.hpp"
#include "test_instances.hpp"

using namespace dht;
using dht::testing::random_pair;

namespace {

JointPmf diag_qux(double d) {
  return JointPmf(std::vector<std::vector<double>>{{d, 0.5 - d}, {0.5 - d, d}});
}

RcProblem random_problem(std::uint64_t seed, int idx, bool strong = false) {
  CounterRng rng(seed, idx);
  auto u = [&] { return rng.uniform01(); };
  double d = strong ? 0.32 + 0.12 * u() : 0.27 + 0.2 * u();
  double a = 0.02 + (strong ? 0.08 : 0.2) * u();
  double b = 0.02 + (strong ? 0.08 : 0.2) * u();
  HypothesisPair pair = HypothesisPair::from_channels(
      Pmf::uniform(2), Channel({{1 - a, a}, {a, 1 - a}}),
      Pmf::uniform(2), Channel({{b, 1 - b}, {1 - b, b}}));
  double rate = 0.05 + 0.4 * u();
  double rb = strong ? 0.002 + 0.12 * u() : 0.02 + 0.3 * u();
  double tau = 0.25 + 1.75 * u();
  return RcProblem(rate, rb, diag_qux(d), tau, pair);
}

}  // namespace

TEST_CASE("brc prime basics") {
  HypothesisPair bx = HypothesisPair::binary_example();
  SolveOptions so;
  so.multistarts = 4;
  SUBCASE("identical channels at tau = 0: feasible-point upper bound") {
    HypothesisPair same = HypothesisPair::from_channels(
        Pmf::uniform(2), Channel::bsc(0.15), Pmf::uniform(2), Channel::bsc(0.15));
    RcProblem p(0.25, 0.1, diag_qux(0.35), 0.0, same);
    SolveReport r = solve_brc_prime(p, so);
    CHECK(r.value >= 0.0);
    // the channel-induced pair is feasible (identical output marginals)
    JointTriple ind = r.witness_q;  // shape template
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
          ind.at(u, x, y) = p.q_ux(u, x) * same.p_y_given_x()(x, y);
    CHECK(r.value <= brc_prime_objective(p, ind, ind) + 1e-9);
  }
  SUBCASE("report invariants") {
    for (int i = 0; i < 5; ++i) {
      RcProblem p = random_problem(401, i);
      SolveReport r = solve_brc_prime(p, so);
      CHECK(r.constraint_violation <= 1e-7);
      CHECK(r.value ==
            doctest::Approx(brc_prime_objective(p, r.witness_q, r.witness_qbar))
                .epsilon(1e-8));
      CHECK(r.value >= 0.0);
    }
  }
  SUBCASE("kkt residual at the witness") {
    for (double tau : {0.5, 1.0, 2.0}) {
      RcProblem p(0.3, 0.15, diag_qux(0.35), tau, bx);
      SolveReport r = solve_brc_prime(p, so);
      CHECK(r.kkt_residual <= 1e-6);
    }
  }
  SUBCASE("grid oracle agreement") {
    for (int i = 0; i < 5; ++i) {
      RcProblem p = random_problem(42, i);
      double grid = brc_prime_grid(p, GridOptions{});
      double solver = solve_brc_prime(p, so).value;
      CHECK(std::abs(grid - solver) < 5e-3);
      CHECK(grid >= solver - 1e-6);  // both upper-bound the true minimum
    }
  }
}

TEST_CASE("brc double prime three-step rule") {
  SolveOptions so;
  so.multistarts = 4;
  SUBCASE("unreachable constraint gives infinity") {
    RcProblem p = random_problem(77, 0);
    RcProblem big(p.rate, std::log(2.0) + 0.01, p.q_ux, p.tau, p.pair);
    CHECK(solve_brc_doubleprime(big, so).value == kInf);
  }
  SUBCASE("finite cases agree with the constrained grid") {
    int finite = 0;
    for (int i = 0; i < 8 && finite < 2; ++i) {
      RcProblem p = random_problem(2024, i, /*strong=*/true);
      SolveReport r = solve_brc_doubleprime(p, so);
      if (r.value == kInf) continue;
      ++finite;
      double grid = brc_doubleprime_grid_constrained(p, GridOptions{});
      CHECK(std::abs(grid - r.value) < 5e-3);
    }
    CHECK(finite >= 1);
  }
  SUBCASE("infinite cases are dominated on the grid") {
    for (int i = 0; i < 4; ++i) {
      RcProblem p = random_problem(555, i);
      SolveReport r = solve_brc_doubleprime(p, so);
      if (r.value != kInf) continue;
      double grid = brc_doubleprime_grid_constrained(p, GridOptions{});
      double prime = solve_brc_prime(p, so).value;
      CHECK((grid == kInf || grid >= prime - 5e-3));
    }
  }
}

TEST_CASE("brc combination and monotonicity") {
  SolveOptions so;
  so.multistarts = 2;
  SUBCASE("equals prime when double prime is infinite") {
    RcProblem p = random_problem(7, 1);
    RcProblem big(p.rate, std::log(2.0) + 0.05, p.q_ux, p.tau, p.pair);
    SolveReport r = solve_brc(big, so);
    CHECK(r.value == doctest::Approx(solve_brc_prime(big, so).value).epsilon(1e-9));
  }
  SUBCASE("rb sweeps are monotone") {
    std::vector<double> rbs;
    for (int k = 0; k < 9; ++k) rbs.push_back(0.002 + k * 0.55 / 8);
    for (int i = 0; i < 3; ++i) {
      RcProblem base = random_problem(777, i);
      auto vp = solve_brc_prime_sweep(base, rbs, so);
      auto vpp = solve_brc_doubleprime_sweep(base, rbs, so);
      for (std::size_t k = 1; k < rbs.size(); ++k) {
        CHECK(vp[k] <= vp[k - 1] + 1e-9);
        CHECK(vpp[k] >= vpp[k - 1] - 1e-9);
      }
    }
  }
  SUBCASE("degenerate U with rb = H(Qx) - R reduces to pure binning") {
    HypothesisPair bx = HypothesisPair::binary_example();
    JointPmf qux1(std::vector<std::vector<double>>{{0.5, 0.5}});
    double hx = std::log(2.0);
    for (double rate : {0.1, 0.3}) {
      RcProblem p(rate, hx - rate, qux1, 1.0, bx);
      SolveOptions full;
      full.multistarts = 6;
      SolveReport r = solve_brc(p, full);
      double direct = binned_brc(rate, Pmf::uniform(2), 1.0, bx, full);
      CHECK(std::abs(r.value - direct) < 1e-6);
      // the double-prime branch cannot bind at |U| = 1
      CHECK(solve_brc_doubleprime(p, full).value == kInf);
    }
  }
}

TEST_CASE("objective convexity certificate") {
  // random convex combinations of two points have objective below the chord
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(91, i);
    RcProblem p = random_problem(91, i);
    auto random_triple = [&]() {
      JointTriple t(2, 2, 2);
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t x = 0; x < 2; ++x) {
          double a = 0.05 + 0.9 * rng.uniform01();
          for (std::size_t y = 0; y < 2; ++y)
            t.at(u, x, y) = p.q_ux(u, x) * (y == 0 ? a : 1.0 - a);
        }
      return t;
    };
    JointTriple q1 = random_triple(), qb1 = random_triple();
    JointTriple q2 = random_triple(), qb2 = random_triple();
    double lam = rng.uniform01();
    JointTriple qm(2, 2, 2), qbm(2, 2, 2);
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
          qm.at(u, x, y) = lam * q1(u, x, y) + (1 - lam) * q2(u, x, y);
          qbm.at(u, x, y) = lam * qb1(u, x, y) + (1 - lam) * qb2(u, x, y);
        }
    double chord = lam * brc_prime_objective(p, q1, qb1) +
                   (1 - lam) * brc_prime_objective(p, q2, qb2);
    CHECK(brc_prime_objective(p, qm, qbm) <= chord + 1e-9);
    double chord2 = lam * brc_doubleprime_objective(p, q1, qb1) +
                    (1 - lam) * brc_doubleprime_objective(p, q2, qb2);
    CHECK(brc_doubleprime_objective(p, qm, qbm) <= chord2 + 1e-9);
  }
}

TEST_CASE("expurgated exponent") {
  HypothesisPair bx = HypothesisPair::binary_example();
  Pmf u2 = Pmf::uniform(2);
  SolveOptions so;
  so.multistarts = 6;
  SUBCASE("feasible-point upper bounds") {
    for (double tau : {0.5, 1.0, 3.0}) {
      BexReport r0 = solve_bex(0.0, u2, tau, bx, so);
      CHECK(r0.value <= (tau + 1.0) * chernoff_diag(u2, tau, bx) + 1e-6);
      double rate = 0.3;
      BexReport r = solve_bex(rate, u2, tau, bx, so);
      JointPmf indep = JointPmf::product(u2, u2);
      CHECK(r.value <= (tau + 1.0) * (chernoff_avg(indep, tau, bx) + rate -
                                      u2.entropy()) +
                           1e-6);
      CHECK(r.value == doctest::Approx(bex_objective(rate, tau, bx,
                                                     r.witness_coupling))
                           .epsilon(1e-8));
    }
  }
  SUBCASE("grid oracle agreement") {
    for (double rate : {0.1, 0.3, 0.6}) {
      for (double tau : {0.5, 1.5}) {
        double g = bex_grid_binary(rate, u2, tau, bx, 400);
        double v = solve_bex(rate, u2, tau, bx, so).value;
        CHECK(std::abs(g - v) < 2e-3);
      }
    }
    // asymmetric marginal as well
    Pmf q({0.3, 0.7});
    double g = bex_grid_binary(0.2, q, 1.0, bx, 400);
    double v = solve_bex(0.2, q, 1.0, bx, so).value;
    CHECK(std::abs(g - v) < 2e-3);
  }
  SUBCASE("infeasible rate rejected") {
    CHECK_THROWS_AS(solve_bex(std::log(2.0) + 0.01, u2, 1.0, bx, so),
                    std::invalid_argument);
  }
}

TEST_CASE("lambda-parameterized forms") {
  HypothesisPair bx = HypothesisPair::binary_example();
  SolveOptions so;
  so.multistarts = 2;
  SUBCASE("lambda <-> tau objective identity on random instances") {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      CounterRng rng(311, i);
      auto u = [&] { return rng.uniform01(); };
      JointPmf qux = diag_qux(0.3 + 0.15 * u());
      double lambda = 0.1 + 0.8 * u();
      double rho = 0.1 + 0.4 * u(), rho_c = 0.05 + 0.3 * u();
      double hx = qux.marginal_y().entropy();
      RcProblem p(hx - rho, rho_c, qux, lambda_to_tau(lambda), bx);
      SolveReport r = solve_brc_prime(p, so);
      double tau_form = brc_prime_objective(p, r.witness_q, r.witness_qbar);
      double lam_form = arc_prime_objective_lambda(rho, rho_c, qux, lambda, bx,
                                                   r.witness_q, r.witness_qbar);
      worst = std::max(worst, std::abs(lam_form - lambda * tau_form));
      double tau_form2 = brc_doubleprime_objective(p, r.witness_q, r.witness_qbar);
      double lam_form2 = arc_doubleprime_objective_lambda(
          rho, rho_c, qux, lambda, bx, r.witness_q, r.witness_qbar);
      worst = std::max(worst, std::abs(lam_form2 - lambda * tau_form2));
    }
    CHECK(worst < 1e-8);
  }
  SUBCASE("arc record structure") {
    ArcForms f = arc_forms(0.3, 0.15, diag_qux(0.35), 0.5, bx, so);
    CHECK(f.a_rc == doctest::Approx(std::min(f.a_rc_prime, f.a_rc_doubleprime)));
    CHECK(f.a_rc_prime >= 0.0);
    CHECK_THROWS_AS(arc_forms(0.3, 0.15, diag_qux(0.35), 0.0, bx, so),
                    std::invalid_argument);
  }
  SUBCASE("lambda = 1 collapses the Q-divergence weight") {
    // at lambda = 1 (tau = 0) the prime objective drops the Q divergence
    JointPmf qux = diag_qux(0.35);
    RcProblem p(0.3, 0.15, qux, 0.0, bx);
    SolveReport r = solve_brc_prime(p, SolveOptions{});
    double v1 = arc_prime_objective_lambda(std::log(2.0) - 0.3, 0.15, qux, 1.0,
                                           bx, r.witness_q, r.witness_qbar);
    double direct = brc_prime_objective(p, r.witness_q, r.witness_qbar);
    CHECK(v1 == doctest::Approx(direct).epsilon(1e-10));  // lambda*B with lambda=1
  }
}
