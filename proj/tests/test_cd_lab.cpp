#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "dht/cd_code.hpp"
#include "dht/cover.hpp"
#include "dht/ensemble.hpp"
#include "dht/rc_exponents.hpp"
#include "test_instances.hpp"

using namespace dht;

namespace {
const HypothesisPair kBx = HypothesisPair::binary_example();
}

TEST_CASE("induced distribution") {
  SUBCASE("single codeword is the product law") {
    std::vector<int> cw = {0, 1, 1, 0, 1};
    CdCode code = CdCode::single(cw);
    auto dist = induced_distribution(code, kBx.p_y_given_x());
    long double sum = 0.0L;
    for (auto v : dist) sum += v;
    CHECK(std::abs(static_cast<double>(sum) - 1.0) < 1e-10);
    // spot check one output sequence: y = 01101
    std::size_t idx = 0;
    std::vector<int> y = {0, 1, 1, 0, 1};
    for (int v : y) idx = idx * 2 + v;
    double expect = 1.0;
    for (int i = 0; i < 5; ++i) expect *= kBx.p_y_given_x()(cw[i], y[i]);
    CHECK(static_cast<double>(dist[idx]) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("whole type class under a symmetric channel is permutation invariant") {
    TypeDescriptor t({3, 3}, 6);
    CdCode code;
    code.n = 6;
    code.codewords = type_enumerate(t);
    auto dist = induced_distribution(code, kBx.p_y_given_x());
    // equal mass on each Y-type orbit
    std::map<std::vector<int>, std::set<double>> orbit;
    for (std::size_t idx = 0; idx < dist.size(); ++idx) {
      std::vector<int> y(6);
      std::size_t rem = idx;
      for (int i = 5; i >= 0; --i) {
        y[i] = rem % 2;
        rem /= 2;
      }
      double rounded = std::round(static_cast<double>(dist[idx]) * 1e13);
      orbit[TypeDescriptor::of_sequence(y, 2).counts].insert(rounded);
    }
    for (const auto& [counts, vals] : orbit) CHECK(vals.size() == 1);
  }
  SUBCASE("normalization for random codes") {
    CounterRng rng(3, 0);
    TypeDescriptor t({5, 3}, 8);
    auto all = type_enumerate(t);
    rng.shuffle(all);
    CdCode code;
    code.n = 8;
    code.codewords.assign(all.begin(), all.begin() + 11);
    for (const Channel& ch : {kBx.p_y_given_x(), kBx.pbar_y_given_x()}) {
      auto dist = induced_distribution(code, ch);
      long double sum = 0.0L;
      for (auto v : dist) sum += v;
      CHECK(std::abs(static_cast<double>(sum) - 1.0) < 1e-10);
    }
  }
  SUBCASE("size guard") {
    CdCode code = CdCode::single(std::vector<int>(40, 0));
    CHECK_THROWS_AS(induced_distribution(code, kBx.p_y_given_x()), SizeGuardError);
  }
}

TEST_CASE("cd detector exact error probabilities") {
  TypeDescriptor t({4, 4}, 8);
  auto all = type_enumerate(t);
  CdCode code;
  code.n = 8;
  for (int i = 0; i < 7; ++i) code.codewords.push_back(all[i * 3]);
  SUBCASE("degenerate thresholds") {
    NpResult hi = cd_np_exact(code, kBx, 50.0, 0.0);
    CHECK(hi.p1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi.p2 == 0.0);
    NpResult lo = cd_np_exact(code, kBx, -50.0, 0.0);
    CHECK(lo.p1 == 0.0);
    CHECK(lo.p2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("permutation invariance, exact") {
    NpResult a = cd_np_exact(code, kBx, 0.0137, 0.25);
    std::vector<std::size_t> perm = {3, 1, 4, 0, 7, 2, 6, 5};
    CdCode pc;
    pc.n = 8;
    for (const auto& cw : code.codewords)
      pc.codewords.push_back(permute_sequence(cw, perm));
    NpResult b = cd_np_exact(pc, kBx, 0.0137, 0.25);
    CHECK(std::abs(a.p1 - b.p1) < 1e-12);
    CHECK(std::abs(a.p2 - b.p2) < 1e-12);
  }
  SUBCASE("single constant codeword reduces to the ordinary oracle") {
    for (int n : {5, 9}) {
      CdCode single = CdCode::single(std::vector<int>(n, 1));
      NpResult a = cd_np_exact(single, kBx, 0.0137, 0.3);
      NpResult b = np_exact(kBx.p_y_given_x().row(1), kBx.pbar_y_given_x().row(1),
                            n, 0.0137, 0.3);
      CHECK(std::abs(a.p1 - b.p1) < 1e-12);
      CHECK(std::abs(a.p2 - b.p2) < 1e-12);
    }
  }
}

TEST_CASE("exact chernoff parameter of a code") {
  std::vector<int> cw = {0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0};
  CdCode code = CdCode::single(cw);
  SUBCASE("single codeword factorizes") {
    for (double lam : {0.25, 0.5, 0.8}) {
      double lhs = chernoff_parameter_exact(code, kBx, lam);
      Pmf qx = TypeDescriptor::of_sequence(cw, 2).pmf();
      CHECK(std::abs(lhs + chernoff_diag_lambda(qx, lam, kBx)) < 1e-12);
    }
  }
  SUBCASE("boundary lambdas vanish") {
    CHECK(std::abs(chernoff_parameter_exact(code, kBx, 0.0)) < 1e-12);
    CHECK(std::abs(chernoff_parameter_exact(code, kBx, 1.0)) < 1e-12);
  }
  SUBCASE("identical hypotheses vanish for all lambda") {
    HypothesisPair same = HypothesisPair::from_channels(
        Pmf::uniform(2), Channel::bsc(0.2), Pmf::uniform(2), Channel::bsc(0.2));
    for (double lam : {0.2, 0.5, 0.9})
      CHECK(std::abs(chernoff_parameter_exact(code, same, lam)) < 1e-12);
  }
}

TEST_CASE("hierarchical ensemble draws") {
  int n = 12;
  TypeDescriptor qux({4, 2, 2, 4}, n);
  EnsembleSpec spec(n, 2, 2, qux, 0.15, 0.15, 99);
  SUBCASE("rounding rule") {
    EnsembleSpec zero(n, 2, 2, qux, 0.0, 0.0, 1);
    CHECK(zero.num_clouds() == 1);
    CHECK(zero.num_satellites() == 1);
    CHECK(spec.num_clouds() == 6);  // round(e^{1.8}) = round(6.05)
  }
  SUBCASE("every satellite has the exact joint type with its center") {
    HierarchicalDraw d = draw_hierarchical(spec, 0);
    for (std::size_t c = 0; c < d.centers.size(); ++c) {
      CHECK(TypeDescriptor::of_sequence(d.centers[c], 2) ==
            TypeDescriptor(spec.u_counts(), n));
      for (const auto& s : d.satellites[c])
        CHECK(joint_type(d.centers[c], s, 2, 2) == qux);
    }
    CdCode dedup = d.dedup(2, 2);
    CHECK_NOTHROW(dedup.validate(2, 2));
    CHECK(dedup.codewords.size() <= static_cast<std::size_t>(d.multiplicity_total()));
  }
  SUBCASE("bit-reproducible draws") {
    HierarchicalDraw a = draw_hierarchical(spec, 7);
    HierarchicalDraw b = draw_hierarchical(spec, 7);
    CHECK(a.centers == b.centers);
    CHECK(a.satellites == b.satellites);
    HierarchicalDraw c = draw_hierarchical(spec, 8);
    CHECK(a.centers != c.centers);
  }
  SUBCASE("mean distinct count tracks e^{n rho}") {
    // Lemma-4 style probe: within a factor 2 of e^{n rho} at low rate
    EnsembleSpec lo(n, 2, 2, qux, 0.17, 0.17, 4242);
    double mean = 0.0;
    int trials = 200;
    for (int t = 0; t < trials; ++t)
      mean += static_cast<double>(draw_hierarchical(lo, t).dedup(2, 2).codewords.size());
    mean /= trials;
    double target = std::exp(n * lo.rho_effective());
    CHECK(mean >= target / 2.0);
    CHECK(mean <= target * 2.0);
  }
}

TEST_CASE("enumerator tallies and expectations") {
  int n = 12;
  TypeDescriptor qux({3, 3, 3, 3}, n);
  EnsembleSpec spec(n, 2, 2, qux, 0.25, 0.2, 1234);
  std::vector<int> y(n, 0);
  std::fill(y.begin() + 6, y.end(), 1);
  SUBCASE("sum rules hold exactly on every draw") {
    for (int t = 0; t < 50; ++t) {
      HierarchicalDraw d = draw_hierarchical(spec, t);
      EnumeratorTally tally = enumerate_tally(d, y, 2, 2, 2);
      CHECK(tally.n_total == spec.num_clouds());
      CHECK(tally.m_total == spec.num_clouds() * spec.num_satellites());
      long long msum = 0, nsum = 0;
      for (const auto& [k, v] : tally.m_counts) msum += v;
      for (const auto& [k, v] : tally.n_counts) nsum += v;
      CHECK(msum == tally.m_total);
      CHECK(nsum == tally.n_total);
    }
  }
  SUBCASE("single cloud & satellite has one nonzero M entry") {
    EnsembleSpec tiny(n, 2, 2, qux, 0.0, 0.0, 5);
    HierarchicalDraw d = draw_hierarchical(tiny, 0);
    EnumeratorTally tally = enumerate_tally(d, y, 2, 2, 2);
    CHECK(tally.m_counts.size() == 1);
    CHECK(tally.m_counts.begin()->second == 1);
  }
  SUBCASE("double-entry tally oracle") {
    HierarchicalDraw d = draw_hierarchical(spec, 3);
    EnumeratorTally tally = enumerate_tally(d, y, 2, 2, 2);
    // independent re-count: dense per-pair histograms over flattened symbols
    std::map<std::vector<int>, long long> m2;
    for (std::size_t c = 0; c < d.centers.size(); ++c)
      for (const auto& s : d.satellites[c]) {
        std::vector<int> key(8, 0);
        for (int i = 0; i < n; ++i)
          ++key[d.centers[c][i] * 4 + s[i] * 2 + y[i]];
        m2[key] += 1;
      }
    CHECK(m2 == tally.m_counts);
  }
  SUBCASE("exact N expectation: one center") {
    EnsembleSpec one(n, 2, 2, qux, 0.0, 0.0, 5);
    TypeDescriptor quy({4, 2, 2, 4}, n);
    double e = enumerator_expectation_n(one, quy, y, 2);
    // |T(Q_{U|Y}, y)| / |T(Q_U)| with one trial
    double expect = u128_to_double(multinomial({4, 2})) *
                    u128_to_double(multinomial({2, 4})) /
                    u128_to_double(multinomial({6, 6}));
    CHECK(e == doctest::Approx(expect).epsilon(1e-12));
    // incompatible marginals give zero
    CHECK(enumerator_expectation_n(one, TypeDescriptor({5, 1, 2, 4}, n), y, 2) == 0.0);
  }
  SUBCASE("Monte-Carlo agreement for N and M") {
    int trials = 2000;
    TypeDescriptor quy({4, 2, 2, 4}, n);
    double exact = enumerator_expectation_n(spec, quy, y, 2);
    TypeDescriptor quxy({2, 1, 1, 2, 1, 2, 2, 1}, n);
    double exact_m = enumerator_expectation_m(spec, quxy, y, 2);
    double mn = 0, m2n = 0, mm = 0, m2m = 0;
    for (int t = 0; t < trials; ++t) {
      HierarchicalDraw d = draw_hierarchical(spec, t);
      EnumeratorTally tally = enumerate_tally(d, y, 2, 2, 2);
      auto itn = tally.n_counts.find(quy.counts);
      double vn = itn == tally.n_counts.end() ? 0.0 : itn->second;
      auto itm = tally.m_counts.find(quxy.counts);
      double vm = itm == tally.m_counts.end() ? 0.0 : itm->second;
      mn += vn;
      m2n += vn * vn;
      mm += vm;
      m2m += vm * vm;
    }
    mn /= trials;
    mm /= trials;
    double sen = std::sqrt((m2n / trials - mn * mn) / (trials - 1));
    double sem = std::sqrt((m2m / trials - mm * mm) / (trials - 1));
    CHECK(std::abs(exact - mn) <= 3.0 * sen);
    CHECK(std::abs(exact_m - mm) <= 3.0 * sem);
  }
}

TEST_CASE("correlation exponent formula") {
  int nu = 2, nx = 2, ny = 2;
  auto triple_from = [&](const std::vector<double>& flat) {
    JointTriple t(nu, nx, ny);
    std::size_t i = 0;
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) t.at(u, x, y) = flat[i++];
    return t;
  };
  // shared (U,X) marginal [[1/4,1/4],[1/4,1/4]] and Y marginal [1/2,1/2]
  JointTriple q = triple_from({0.25, 0.0, 0.125, 0.125, 0.125, 0.125, 0.0, 0.25});
  JointTriple qb = triple_from({0.125, 0.125, 0.25, 0.0, 0.0, 0.25, 0.125, 0.125});
  double rho = 0.4, rho_c = 0.2, lambda = 0.5;
  SUBCASE("identical types: rho - I(U,X;Y)") {
    InfoMeasures m = info_measures(q);
    CHECK(correlation_exponent_formula(q, q, lambda, rho, rho_c) ==
          doctest::Approx(rho - m.i_ux_y).epsilon(1e-12));
  }
  SUBCASE("lambda = 1 coefficient substitution in Delta") {
    InfoMeasures mq = info_measures(q);
    InfoMeasures mqb = info_measures(qb);
    double expect = (rho - mqb.i_ux_y) -
                    std::max(std::max(mq.i_u_y - rho_c, 0.0), mq.i_ux_y - rho);
    CHECK(delta_lambda(q, qb, 1.0, rho, rho_c) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("distinct UY marginals take the Delta branch") {
    double v = correlation_exponent_formula(q, qb, lambda, rho, rho_c);
    CHECK(v == doctest::Approx(delta_lambda(q, qb, lambda, rho, rho_c)).epsilon(1e-12));
  }
  SUBCASE("equal UY marginals subtract the positive part") {
    // modify qb to share the UY marginal with q but differ as a triple
    JointTriple q2 = triple_from({0.2, 0.05, 0.15, 0.1, 0.1, 0.15, 0.05, 0.2});
    JointTriple q3 = triple_from({0.15, 0.1, 0.2, 0.05, 0.05, 0.2, 0.1, 0.15});
    // q2, q3 share U,X and UY? UY(0,0)=0.2+0.15, q3: 0.15+0.2 -> equal
    double v = correlation_exponent_formula(q2, q3, lambda, rho, rho_c);
    InfoMeasures m = info_measures(q2);
    double expect = delta_lambda(q2, q3, lambda, rho, rho_c) -
                    std::max(m.i_u_y - rho_c, 0.0);
    CHECK(v == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("marginal mismatch rejected") {
    JointTriple bad = triple_from({0.3, 0.0, 0.1, 0.1, 0.1, 0.1, 0.0, 0.3});
    CHECK_THROWS_AS(correlation_exponent_formula(bad, qb, lambda, rho, rho_c),
                    std::invalid_argument);
  }
  SUBCASE("Monte-Carlo tracks the formula and the gap shrinks") {
    double lam = 0.5;
    auto run = [&](int n) {
      // scalable fixture: q_ux = [[n/4,n/4],[n/4,n/4]]; Q near-independent,
      // Qbar deterministic y = u (so the UY marginals differ)
      TypeDescriptor qux({n / 4, n / 4, n / 4, n / 4}, n);
      double rc = 0.3, rs = 0.3;
      EnsembleSpec spec(n, 2, 2, qux, rc, rs, 31337);
      std::vector<int> yv(n, 0);
      std::fill(yv.begin() + n / 2, yv.end(), 1);
      std::vector<int> cq(8, 0), cqb(8, 0);
      // Q: split each (u,x) cell across y; cell splits sum to n/2 per y
      int cell = n / 4;
      int splits[4] = {cell - cell / 2, cell / 2, cell / 2, cell - cell / 2};
      int k = 0;
      for (int u = 0; u < 2; ++u)
        for (int x = 0; x < 2; ++x) {
          cq[u * 4 + x * 2 + 0] = splits[k];
          cq[u * 4 + x * 2 + 1] = cell - splits[k];
          ++k;
        }
      for (int u = 0; u < 2; ++u)
        for (int x = 0; x < 2; ++x) cqb[u * 4 + x * 2 + u] = cell;
      TypeDescriptor tq(cq, n), tqb(cqb, n);
      int trials = 2000;
      long double mean = 0.0L;
      for (int t = 0; t < trials; ++t) {
        HierarchicalDraw d = draw_hierarchical(spec, t);
        EnumeratorTally tal = enumerate_tally(d, yv, 2, 2, 2);
        auto a = tal.m_counts.find(tq.counts);
        auto b = tal.m_counts.find(tqb.counts);
        long double va = a == tal.m_counts.end() ? 0.0L : a->second;
        long double vb = b == tal.m_counts.end() ? 0.0L : b->second;
        mean += std::pow(va, (long double)(1.0 - lam)) * std::pow(vb, (long double)lam);
      }
      mean /= trials;
      double emp = mean > 0 ? static_cast<double>(std::log(mean)) / n : -kInf;
      // formula at the effective rates
      JointTriple qt(2, 2, 2), qbt(2, 2, 2);
      for (int u = 0; u < 2; ++u)
        for (int x = 0; x < 2; ++x)
          for (int yy = 0; yy < 2; ++yy) {
            qt.at(u, x, yy) = cq[u * 4 + x * 2 + yy] / double(n);
            qbt.at(u, x, yy) = cqb[u * 4 + x * 2 + yy] / double(n);
          }
      double formula = correlation_exponent_formula(
          qt, qbt, lam, spec.rho_effective(), spec.rho_c_effective());
      return std::abs(emp - formula);
    };
    double g8 = run(8), g12 = run(12), g16 = run(16);
    CHECK(g12 < 0.15);
    CHECK(g16 < g8);
  }
}

TEST_CASE("greedy cover and the induced DHT system") {
  TypeDescriptor t({4, 4}, 8);
  auto all = type_enumerate(t);
  SUBCASE("base equal to the class needs one identity permutation") {
    CdCode whole;
    whole.n = 8;
    whole.codewords = all;
    CoverResult cov = greedy_cover(t, whole, 3, 10);
    CHECK(cov.permutations.size() == 1);
    CHECK(cov.bins.size() == 1);
    std::vector<std::size_t> identity = {0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(cov.permutations[0] == identity);
  }
  SUBCASE("partition is exact and within the permutation budget") {
    int budget = static_cast<int>(std::ceil(70.0 / 7.0 * std::log(70.0))) + 5;
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
      CounterRng rng(seed, 1);
      auto shuffled = all;
      rng.shuffle(shuffled);
      CdCode base;
      base.n = 8;
      base.codewords.assign(shuffled.begin(), shuffled.begin() + 7);
      CoverResult cov = greedy_cover(t, base, seed, 5000);
      std::set<std::vector<int>> seen;
      std::size_t total = 0;
      for (const auto& b : cov.bins) {
        total += b.size();
        for (const auto& x : b) CHECK(seen.insert(x).second);
      }
      CHECK(total == 70);
      CHECK(seen.size() == 70);
      CHECK(static_cast<int>(cov.permutations.size()) <= budget);
    }
  }
  SUBCASE("budget exceeded throws") {
    CdCode base;
    base.n = 8;
    base.codewords.assign(all.begin(), all.begin() + 2);
    CHECK_THROWS_AS(greedy_cover(t, base, 1, 3), std::runtime_error);
  }
  SUBCASE("dht system from the cover") {
    CounterRng rng(1, 1);
    auto shuffled = all;
    rng.shuffle(shuffled);
    CdCode base;
    base.n = 8;
    base.codewords.assign(shuffled.begin(), shuffled.begin() + 7);
    CoverResult cov = greedy_cover(t, base, 1, 5000);
    CoverDhtResult r = dht_from_cover(cov.bins, kBx, 0.0137, 0.25);
    // one-bin cover equals the plain CD detector
    CdCode whole;
    whole.n = 8;
    whole.codewords = all;
    CoverResult triv = greedy_cover(t, whole, 3, 10);
    CoverDhtResult rw = dht_from_cover(triv.bins, kBx, 0.0137, 0.25);
    NpResult direct = cd_np_exact(whole, kBx, 0.0137, 0.25);
    CHECK(std::abs(rw.p1 - direct.p1) < 1e-12);
    CHECK(std::abs(rw.p2 - direct.p2) < 1e-12);
    // within factor 3 of the best single bin at the matched threshold
    double best1 = kInf, best2 = kInf;
    for (std::size_t i = 0; i < r.per_bin.size(); ++i) {
      if (r.bin_sizes[i] == 0) continue;
      best1 = std::min(best1, r.per_bin[i].p1);
      best2 = std::min(best2, r.per_bin[i].p2);
    }
    CHECK(r.p1 <= 3.0 * best1);
    CHECK(r.p2 <= 3.0 * best2);
    // a common permutation of all bins leaves the probabilities unchanged
    std::vector<std::size_t> perm = {7, 2, 5, 0, 3, 6, 1, 4};
    auto bins2 = cov.bins;
    for (auto& b : bins2)
      for (auto& x : b) x = permute_sequence(x, perm);
    CoverDhtResult r2 = dht_from_cover(bins2, kBx, 0.0137, 0.25);
    CHECK(std::abs(r.p1 - r2.p1) < 1e-12);
    CHECK(std::abs(r.p2 - r2.p2) < 1e-12);
  }
}

TEST_CASE("ensemble chernoff parameter against the single-letter bound") {
  // Lemma-3 style probe at n = 12 with a reduced draw count (the acceptance
  // suite runs the frozen 200-draw version across n).
  int n = 12, trials = 60;
  double lambda = 0.5, rho_c = 0.15, rho_s = 0.15;
  int a = (3 * n) / 8, b = n / 2 - a;
  TypeDescriptor qux({a, b, b, a}, n);
  EnsembleSpec spec(n, 2, 2, qux, rho_c, rho_s, 20240809);
  long double mean = 0.0L;
  for (int t = 0; t < trials; ++t) {
    HierarchicalDraw d = draw_hierarchical(spec, t);
    CdCode code;
    code.n = n;
    for (const auto& sats : d.satellites)
      for (const auto& s : sats) code.codewords.push_back(s);
    auto py = induced_distribution(code, kBx.p_y_given_x());
    auto pby = induced_distribution(code, kBx.pbar_y_given_x());
    long double sum = 0.0L;
    for (std::size_t i = 0; i < py.size(); ++i)
      sum += std::pow(py[i], (long double)(1.0 - lambda)) *
             std::pow(pby[i], (long double)lambda);
    mean += sum;
  }
  mean /= trials;
  double emp = -static_cast<double>(std::log(mean)) / n;
  JointPmf quxp({{double(a) / n, double(b) / n}, {double(b) / n, double(a) / n}});
  Pmf qx = quxp.marginal_y();
  double d_lam = chernoff_diag_lambda(qx, lambda, kBx);
  SolveOptions so;
  so.multistarts = 4;
  double brc = solve_brc(RcProblem(std::max(0.0, qx.entropy() - spec.rho_effective()),
                                   spec.rho_c_effective(), quxp,
                                   lambda_to_tau(lambda), kBx),
                         so)
                   .value;
  double bound = std::min(d_lam, lambda * brc);
  CHECK(emp >= bound - 0.15);
}
