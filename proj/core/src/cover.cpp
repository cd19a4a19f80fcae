#include "dht/cover.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace dht {

CoverResult greedy_cover(const TypeDescriptor& q, const CdCode& base,
                         std::uint64_t seed, int max_perms) {
  const int n = q.n;
  for (const auto& cw : base.codewords)
    if (!(TypeDescriptor::of_sequence(cw, q.alphabet()) == q))
      throw std::invalid_argument("greedy_cover: base not inside T_n(q)");

  std::vector<std::vector<int>> full = type_enumerate(q);
  std::set<std::vector<int>> remaining(full.begin(), full.end());

  CoverResult out;
  out.class_size = full.size();
  CounterRng rng(seed, 0);
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  std::vector<std::size_t> perm = identity;
  while (!remaining.empty()) {
    if (out.candidates_drawn > max_perms)
      throw std::runtime_error("greedy_cover: max_perms exceeded");
    std::vector<std::vector<int>> bin;
    for (const auto& cw : base.codewords) {
      std::vector<int> img = permute_sequence(cw, perm);
      auto it = remaining.find(img);
      if (it != remaining.end()) {
        bin.push_back(img);
        remaining.erase(it);
      }
    }
    ++out.candidates_drawn;
    if (!bin.empty()) {
      out.permutations.push_back(perm);
      out.bins.push_back(std::move(bin));
    }
    // next candidate permutation
    perm = identity;
    rng.shuffle(perm);
  }
  return out;
}

CoverDhtResult dht_from_cover(const std::vector<std::vector<std::vector<int>>>& bins,
                              const HypothesisPair& pair, double threshold,
                              double eta) {
  CoverDhtResult out;
  std::size_t total = 0;
  for (const auto& b : bins) total += b.size();
  if (total == 0) throw std::invalid_argument("dht_from_cover: empty bins");
  for (const auto& b : bins) {
    if (b.empty()) {
      out.per_bin.push_back({0.0, 0.0});
      out.bin_sizes.push_back(0);
      continue;
    }
    CdCode code;
    code.n = static_cast<int>(b[0].size());
    code.codewords = b;
    NpResult r = cd_np_exact(code, pair, threshold, eta);
    double wgt = static_cast<double>(b.size()) / static_cast<double>(total);
    out.p1 += wgt * r.p1;
    out.p2 += wgt * r.p2;
    out.per_bin.push_back(r);
    out.bin_sizes.push_back(b.size());
  }
  return out;
}

}  // namespace dht
