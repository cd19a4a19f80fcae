#include <cmath>
#include <set>

#include "doctest.h"
#include "dht/hypothesis.hpp"
#include "dht/joint.hpp"
#include "dht/pmf.hpp"
#include "dht/type_class.hpp"
#include "test_instances.hpp"

using namespace dht;
using dht::testing::random_pmf;

TEST_CASE("pmf construction and normalization") {
  Pmf p({0.5, 0.5 + 5e-10});  // within the 1e-9 band -> renormalized
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Pmf({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({-0.1, 1.1}), std::invalid_argument);
  CHECK(Pmf::degenerate(3, 1)[1] == 1.0);
  CHECK(Pmf::uniform(4).entropy() == doctest::Approx(std::log(4.0)));
}

TEST_CASE("kl basics") {
  Pmf u = Pmf::uniform(2);
  CHECK(kl(u, u) == 0.0);
  CHECK(kl(Pmf({1.0, 0.0}), u) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(kl(u, Pmf({1.0, 0.0})) == kInf);
  CHECK_THROWS_AS(kl(u, Pmf::uniform(3)), std::invalid_argument);
}

TEST_CASE("conditional kl") {
  Channel a = Channel::bsc(0.1), b = Channel::bsc(0.01);
  Pmf u = Pmf::uniform(2);
  CHECK(conditional_kl(a, a, u) == 0.0);
  // degenerate weight reduces to the single-row divergence
  CHECK(conditional_kl(a, b, Pmf::degenerate(2, 0)) ==
        doctest::Approx(kl(a.row(0), b.row(0))).epsilon(1e-15));
  double closed = 0.1 * std::log(10.0) + 0.9 * std::log(0.9 / 0.99);
  CHECK(conditional_kl(a, b, u) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(std::abs(conditional_kl(a, b, u) - 0.1444797) < 1e-6);
}

TEST_CASE("info measures") {
  SUBCASE("product distribution has zero mutual informations") {
    JointTriple t(2, 2, 2);
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) t.at(u, x, y) = 0.3 * 0.6 * 0.25;
    // overwrite with an actual product of three pmfs
    double pu[2] = {0.3, 0.7}, px[2] = {0.6, 0.4}, py[2] = {0.25, 0.75};
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) t.at(u, x, y) = pu[u] * px[x] * py[y];
    InfoMeasures m = info_measures(t);
    CHECK(m.i_u_y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.i_ux_y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.i_x_y_given_u == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.i_u_x == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("deterministic copy chain") {
    JointTriple t(2, 2, 2);
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) t.at(u, x, y) = 0.0;
    t.at(0, 0, 0) = 0.5;
    t.at(1, 1, 1) = 0.5;
    InfoMeasures m = info_measures(t);
    CHECK(m.i_u_y == doctest::Approx(std::log(2.0)));
    CHECK(m.i_ux_y == doctest::Approx(std::log(2.0)));
    CHECK(m.i_x_y_given_u == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("chain identity on random triples") {
    for (int i = 0; i < 25; ++i) {
      CounterRng rng(11, i);
      JointTriple t(2, 2, 2);
      double sum = 0.0;
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t y = 0; y < 2; ++y) {
            t.at(u, x, y) = 0.02 + rng.uniform01();
            sum += t(u, x, y);
          }
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t y = 0; y < 2; ++y) t.at(u, x, y) /= sum;
      InfoMeasures m = info_measures(t);
      CHECK(std::abs(m.i_ux_y - (m.i_u_y + m.i_x_y_given_u)) < 1e-10);
    }
  }
}

TEST_CASE("chernoff parameters") {
  HypothesisPair bx = HypothesisPair::binary_example();
  SUBCASE("tau = 0 is the row normalization") {
    CHECK(chernoff_symbol(0, 1, 0.0, bx) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(chernoff_avg(JointPmf::product(Pmf::uniform(2), Pmf::uniform(2)), 0.0, bx) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("identical channels on the diagonal") {
    HypothesisPair same = HypothesisPair::from_channels(
        Pmf::uniform(2), Channel::bsc(0.2), Pmf::uniform(2), Channel::bsc(0.2));
    for (double tau : {0.3, 1.0, 5.0})
      CHECK(chernoff_symbol(0, 0, tau, same) == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("binary example value") {
    double closed = -std::log(std::sqrt(0.891) + std::sqrt(0.001));
    CHECK(chernoff_symbol(0, 0, 1.0, bx) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(std::abs(chernoff_symbol(0, 0, 1.0, bx) - 0.0247529) < 1e-6);
    // symmetric instance, both symbols equal -> diagonal average equals it
    CHECK(chernoff_diag(Pmf::uniform(2), 1.0, bx) == doctest::Approx(closed).epsilon(1e-13));
  }
  SUBCASE("degenerate coupling reduces to the symbol") {
    std::vector<std::vector<double>> j = {{0.0, 1.0}, {0.0, 0.0}};
    CHECK(chernoff_avg(JointPmf(j), 2.0, bx) ==
          doctest::Approx(chernoff_symbol(0, 1, 2.0, bx)).epsilon(1e-15));
  }
  SUBCASE("disjoint rows give the infinity sentinel") {
    Channel p({{1.0, 0.0}, {0.0, 1.0}});
    Channel q({{0.0, 1.0}, {1.0, 0.0}});
    HypothesisPair pair = HypothesisPair::from_channels(Pmf::uniform(2), p,
                                                        Pmf::uniform(2), q);
    CHECK(chernoff_symbol(0, 0, 1.0, pair) == kInf);
  }
  SUBCASE("concavity in lambda (midpoint)") {
    for (int i = 0; i < 30; ++i) {
      CounterRng rng(13, i);
      HypothesisPair pair = dht::testing::random_pair(rng, 2, 3);
      double l1 = 0.1 + 0.3 * rng.uniform01();
      double l2 = 0.5 + 0.4 * rng.uniform01();
      auto g = [&](double lam) {
        return chernoff_symbol_lambda(0, 1, lam, pair.p_y_given_x(),
                                      pair.pbar_y_given_x());
      };
      CHECK(g(0.5 * (l1 + l2)) >= 0.5 * (g(l1) + g(l2)) - 1e-12);
    }
  }
  SUBCASE("divergence characterization of the diagonal parameter") {
    // (tau+1) d_tau(Q_X) = min over Q_{Y|X} of
    //   tau D(Q||P|Q_X) + D(Q||Pbar|Q_X); per-row scan oracle
    Pmf qx({0.3, 0.7});
    for (double tau : {0.5, 1.0, 2.0}) {
      double lhs = (tau + 1.0) * chernoff_diag(qx, tau, bx);
      double rhs = 0.0;
      for (std::size_t x = 0; x < 2; ++x) {
        double best = kInf;
        for (int k = 1; k < 1000; ++k) {
          Pmf row({k / 1000.0, 1.0 - k / 1000.0});
          best = std::min(best, tau * kl(row, bx.p_y_given_x().row(x)) +
                                    kl(row, bx.pbar_y_given_x().row(x)));
        }
        rhs += qx[x] * best;
      }
      CHECK(std::abs(lhs - rhs) < 1e-3);
    }
  }
}

TEST_CASE("pinsker-type lower bounds on kl") {
  for (int i = 0; i < 50; ++i) {
    CounterRng rng(17, i);
    Pmf q = random_pmf(rng, 3, 0.0);
    Pmf p = random_pmf(rng, 3, 0.01);
    double d = kl(q, p);
    double l1 = 0.0, l2sq = 0.0;
    for (std::size_t z = 0; z < 3; ++z) {
      l1 += std::abs(q[z] - p[z]);
      l2sq += (q[z] - p[z]) * (q[z] - p[z]);
    }
    CHECK(d >= l1 * l1 / 2.0 - 1e-12);               // Pinsker, nats
    CHECK(d >= l2sq / (2.0 * std::log(2.0)) - 1e-12);  // Euclidean form
    if (l1 > 1e-9) CHECK(d > 0.0);
  }
}

TEST_CASE("type classes") {
  CHECK(type_class_size(TypeDescriptor({3, 3}, 6)) == u128(20));
  CHECK(type_class_size(TypeDescriptor({6, 0}, 6)) == u128(1));
  TypeDescriptor t44({4, 4}, 8);
  CHECK(type_class_size(t44) == u128(70));
  auto seqs = type_enumerate(t44);
  CHECK(seqs.size() == 70);
  std::set<std::vector<int>> uniq(seqs.begin(), seqs.end());
  CHECK(uniq.size() == 70);
  for (const auto& s : seqs)
    CHECK(TypeDescriptor::of_sequence(s, 2) == t44);

  SUBCASE("sizes match enumeration for all binary and ternary types, n <= 12") {
    for (int n = 1; n <= 12; ++n) {
      for (int a = 0; a <= n; ++a) {
        TypeDescriptor t({a, n - a}, n);
        CHECK(type_enumerate(t).size() ==
              static_cast<std::size_t>(u128_to_double(type_class_size(t))));
      }
      for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) {
          TypeDescriptor t({a, b, n - a - b}, n);
          CHECK(type_enumerate(t).size() ==
                static_cast<std::size_t>(u128_to_double(type_class_size(t))));
        }
    }
  }
  SUBCASE("joint types") {
    std::vector<int> xs = {0, 1, 1, 0}, ys = {1, 1, 0, 0};
    TypeDescriptor j = joint_type(xs, ys, 2, 2);
    CHECK(j.counts == std::vector<int>({1, 1, 1, 1}));
    CHECK_THROWS_AS(joint_type(xs, {0, 1}, 2, 2), std::invalid_argument);
  }
  SUBCASE("overflow guard") {
    // multinomial(128; 64,64) needs ~1.8e38 > 2^127
    CHECK_THROWS_AS(multinomial(std::vector<int>(2, 64 + 64)), std::overflow_error);
  }
}
