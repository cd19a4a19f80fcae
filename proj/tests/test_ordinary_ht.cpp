#include <cmath>

#include "doctest.h"
#include "dht/d2.hpp"
#include "dht/np_exact.hpp"
#include "test_instances.hpp"

using namespace dht;
using dht::testing::random_pmf;

namespace {
const Pmf kP({0.9, 0.1});
const Pmf kPbar({0.99, 0.01});
}  // namespace

TEST_CASE("stein") {
  CHECK(stein(kP, kP) == 0.0);
  double closed = 0.1 * std::log(10.0) + 0.9 * std::log(0.9 / 0.99);
  CHECK(stein(kP, kPbar) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(std::abs(stein(kP, kPbar) - 0.1444797) < 1e-6);
  // binary example joint law
  HypothesisPair bx = HypothesisPair::binary_example();
  CHECK(stein(bx.p_xy.flatten(), bx.pbar_xy.flatten()) ==
        doctest::Approx(closed).epsilon(1e-12));
  CHECK(stein(Pmf({1.0, 0.0}), Pmf({0.0, 1.0})) == kInf);
}

TEST_CASE("d2 primal") {
  SUBCASE("identical hypotheses") {
    for (double d1 : {0.0, 0.01, 1.0}) CHECK(d2_primal(kP, kP, d1) == 0.0);
  }
  SUBCASE("Stein limit at D1 -> 0") {
    CHECK(d2_primal(kP, kPbar, 0.0) == doctest::Approx(stein(kP, kPbar)).epsilon(1e-9));
  }
  SUBCASE("negative D1 rejected") {
    CHECK_THROWS_AS(d2_primal(kP, kPbar, -0.01), std::invalid_argument);
  }
  SUBCASE("flat beyond the critical point") {
    double crit = d2_critical_point(kP, kPbar);
    CHECK(d2_primal(kP, kPbar, crit + 0.01) == 0.0);
  }
  SUBCASE("agrees with the dual form at the spec point") {
    CHECK(std::abs(d2_primal(kP, kPbar, 0.01) - d2_chernoff(kP, kPbar, 0.01)) < 2e-3);
  }
  SUBCASE("agrees with the simplex-grid oracle") {
    for (double d1 : {0.004, 0.02, 0.05}) {
      double grid = d2_primal_grid(kP, kPbar, d1, 400);
      CHECK(std::abs(d2_primal(kP, kPbar, d1) - grid) < 2e-3);
    }
  }
  SUBCASE("convex and nonincreasing in D1") {
    double crit = d2_critical_point(kP, kPbar);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(crit * i / 20.0);
    std::vector<double> vals;
    for (double d1 : grid) vals.push_back(d2_primal(kP, kPbar, d1));
    for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] <= vals[i - 1] + 1e-12);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(0.5 * (vals[i - 1] + vals[i + 1]) >= vals[i] - 1e-6);
  }
}

TEST_CASE("d2 chernoff dual") {
  CHECK(d2_chernoff(kP, kP, 0.05) == 0.0);
  CHECK(d2_chernoff(kP, kPbar, 0.0) == doctest::Approx(stein(kP, kPbar)).epsilon(1e-12));
  SUBCASE("primal/dual agreement on random pairs below the critical point") {
    for (int i = 0; i < 20; ++i) {
      CounterRng rng(23, i);
      Pmf p = random_pmf(rng, 2), pb = random_pmf(rng, 2);
      double crit = d2_critical_point(p, pb);
      for (double f : {0.15, 0.5, 0.85}) {
        double d1 = f * crit;
        CHECK(std::abs(d2_primal(p, pb, d1) - d2_chernoff(p, pb, d1)) < 2e-3);
      }
    }
  }
}

TEST_CASE("np exact") {
  SUBCASE("degenerate thresholds") {
    NpResult hi = np_exact(kP, kPbar, 6, 50.0, 0.0);
    CHECK(hi.p1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi.p2 == 0.0);
    NpResult lo = np_exact(kP, kPbar, 6, -50.0, 0.0);
    CHECK(lo.p1 == 0.0);
    CHECK(lo.p2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("n = 1 hand enumeration") {
    NpResult r = np_exact(kP, kPbar, 1, 0.0, 0.0);
    CHECK(r.p1 == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(r.p2 == doctest::Approx(0.01).epsilon(1e-15));
  }
  SUBCASE("matches brute-force enumeration") {
    for (int i = 0; i < 6; ++i) {
      CounterRng rng(29, i);
      Pmf p = random_pmf(rng, 2), pb = random_pmf(rng, 2);
      double t = -0.1 + 0.2 * rng.uniform01();
      double eta = rng.uniform01();
      for (int n : {4, 7, 10}) {
        NpResult a = np_exact(p, pb, n, t, eta);
        NpResult b = np_exact_bruteforce(p, pb, n, t, eta);
        CHECK(a.p1 == doctest::Approx(b.p1).epsilon(1e-12));
        CHECK(a.p2 == doctest::Approx(b.p2).epsilon(1e-12));
      }
    }
    // ternary as well
    CounterRng rng(31, 0);
    Pmf p = random_pmf(rng, 3), pb = random_pmf(rng, 3);
    NpResult a = np_exact(p, pb, 6, 0.01, 0.5);
    NpResult b = np_exact_bruteforce(p, pb, 6, 0.01, 0.5);
    CHECK(a.p1 == doctest::Approx(b.p1).epsilon(1e-12));
    CHECK(a.p2 == doctest::Approx(b.p2).epsilon(1e-12));
  }
  SUBCASE("exact monotonicity in the threshold") {
    for (double eta : {0.0, 0.3, 1.0}) {
      double prev_p1 = -1.0, prev_p2 = 2.0;
      for (int k = -40; k <= 40; ++k) {
        NpResult r = np_exact(kP, kPbar, 8, k * 0.01, eta);
        CHECK(r.p1 >= prev_p1);
        CHECK(r.p2 <= prev_p2);
        prev_p1 = r.p1;
        prev_p2 = r.p2;
      }
    }
  }
  SUBCASE("empirical exponents approach the reliability curve") {
    double d1 = 0.02;
    double d2 = d2_primal(kP, kPbar, d1);
    double prev_gap = kInf;
    for (int n : {8, 16, 32}) {
      // smallest threshold with p1 <= exp(-n d1)
      double lo = -1.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (np_exact(kP, kPbar, n, mid, 0.0).p1 <= std::exp(-n * d1) ? hi : lo) = mid;
      }
      NpResult r = np_exact(kP, kPbar, n, hi, 0.0);
      CHECK(r.p1 <= std::exp(-n * d1) * (1 + 1e-12));
      double e2_emp = -std::log(r.p2) / n;
      CHECK(e2_emp >= d2 - 1e-12);  // the finite-n bound direction
      double gap = e2_emp - d2;
      CHECK(gap <= prev_gap + 1e-12);
      prev_gap = gap;
    }
  }
  SUBCASE("size guard") {
    CHECK_THROWS_AS(np_exact(kP, kPbar, 65, 0.0, 0.0), SizeGuardError);
  }
}

TEST_CASE("tradeoff curve validation") {
  TradeoffCurve c;
  c.points.push_back({0.0, 1.0, 0, 0, false});
  c.points.push_back({0.1, 0.5, 0, 0, false});
  CHECK_NOTHROW(c.validate());
  c.points.push_back({0.05, 0.4, 0, 0, false});
  CHECK_THROWS_AS(c.validate(), std::logic_error);
}
