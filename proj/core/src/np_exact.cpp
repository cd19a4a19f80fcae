#include "dht/np_exact.hpp"

#include <cmath>

namespace dht {

namespace {

void collect_types(std::size_t alphabet, int n, std::vector<int>& c,
                   std::size_t at, int left, std::vector<TypeDescriptor>& out) {
  if (at + 1 == alphabet) {
    c[at] = left;
    out.emplace_back(c, n);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    c[at] = v;
    collect_types(alphabet, n, c, at + 1, left - v, out);
  }
}

long double log_prob_of_type(const TypeDescriptor& t, const Pmf& p) {
  long double lp = 0.0L;
  for (std::size_t z = 0; z < t.counts.size(); ++z) {
    if (t.counts[z] == 0) continue;
    if (p[z] <= 0.0) return -std::numeric_limits<long double>::infinity();
    lp += static_cast<long double>(t.counts[z]) * std::log(static_cast<long double>(p[z]));
  }
  return lp;
}

}  // namespace

std::vector<TypeDescriptor> all_types(std::size_t alphabet, int n) {
  std::vector<TypeDescriptor> out;
  std::vector<int> c(alphabet, 0);
  collect_types(alphabet, n, c, 0, n, out);
  return out;
}

NpResult np_exact(const Pmf& p, const Pmf& pbar, int n, double threshold,
                  double eta) {
  if (p.size() != pbar.size())
    throw std::invalid_argument("np_exact: dimension mismatch");
  if (n < 1 || n > 64) throw SizeGuardError("np_exact: n outside [1,64]");
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("np_exact: eta outside [0,1]");

  const long double inf = std::numeric_limits<long double>::infinity();
  const long double nt = static_cast<long double>(n) * threshold;
  long double p1 = 0.0L, p2 = 0.0L;
  for (const TypeDescriptor& t : all_types(p.size(), n)) {
    long double lp = log_prob_of_type(t, p);
    long double lpbar = log_prob_of_type(t, pbar);
    if (lp == -inf && lpbar == -inf) continue;  // unreachable under both
    long double size = static_cast<long double>(type_class_size(t));
    long double pm = lp == -inf ? 0.0L : size * std::exp(lp);
    long double pbm = lpbar == -inf ? 0.0L : size * std::exp(lpbar);
    long double llr = lp - lpbar;  // +-inf handled by the compares below
    if (llr < nt) {
      p1 += pm;  // decide Hbar
    } else if (llr > nt) {
      p2 += pbm;  // decide H
    } else {
      p1 += (1.0L - static_cast<long double>(eta)) * pm;
      p2 += static_cast<long double>(eta) * pbm;
    }
  }
  return {static_cast<double>(p1), static_cast<double>(p2)};
}

NpResult np_exact_bruteforce(const Pmf& p, const Pmf& pbar, int n,
                             double threshold, double eta) {
  const std::size_t z = p.size();
  double total = std::pow(static_cast<double>(z), n);
  if (total > (1 << 22)) throw SizeGuardError("np_exact_bruteforce: |Z|^n too large");
  const long double inf = std::numeric_limits<long double>::infinity();
  const long double nt = static_cast<long double>(n) * threshold;
  std::size_t count = static_cast<std::size_t>(total);
  long double p1 = 0.0L, p2 = 0.0L;
  std::vector<int> seq(n, 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    long double lp = 0.0L, lpbar = 0.0L;
    for (int i = 0; i < n; ++i) {
      int s = static_cast<int>(rem % z);
      rem /= z;
      lp += p[s] > 0.0 ? std::log(static_cast<long double>(p[s])) : -inf;
      lpbar += pbar[s] > 0.0 ? std::log(static_cast<long double>(pbar[s])) : -inf;
    }
    if (lp == -inf && lpbar == -inf) continue;
    long double pm = lp == -inf ? 0.0L : std::exp(lp);
    long double pbm = lpbar == -inf ? 0.0L : std::exp(lpbar);
    long double llr = lp - lpbar;
    if (llr < nt) {
      p1 += pm;
    } else if (llr > nt) {
      p2 += pbm;
    } else {
      p1 += (1.0L - static_cast<long double>(eta)) * pm;
      p2 += static_cast<long double>(eta) * pbm;
    }
  }
  return {static_cast<double>(p1), static_cast<double>(p2)};
}

}  // namespace dht
