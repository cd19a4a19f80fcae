#pragma once

#include "dht/cd_code.hpp"
#include "dht/rng.hpp"

namespace dht {

/// Permutation covering of a type class by a base CD code: random
/// permutations are drawn until their images cover T_n(q); bin i is the i-th
/// retained image minus all earlier ones, so the bins partition the class
/// exactly. Candidate permutations whose image adds no new element are
/// rejected (they would produce empty bins) but counted in candidates_drawn.
struct CoverResult {
  std::vector<std::vector<std::size_t>> permutations;   // retained, in order
  std::vector<std::vector<std::vector<int>>> bins;      // aligned, nonempty
  std::size_t class_size = 0;
  int candidates_drawn = 0;
};

CoverResult greedy_cover(const TypeDescriptor& q, const CdCode& base,
                         std::uint64_t seed, int max_perms);

/// Exact conditional (on X^n in T_n(q)) error probabilities of the DHT
/// system whose encoder maps x^n to its bin index and whose per-bin detector
/// is the optimal CD threshold test at (T, eta).
struct CoverDhtResult {
  double p1 = 0.0, p2 = 0.0;
  std::vector<NpResult> per_bin;
  std::vector<std::size_t> bin_sizes;
};

CoverDhtResult dht_from_cover(const std::vector<std::vector<std::vector<int>>>& bins,
                              const HypothesisPair& pair, double threshold,
                              double eta);

}  // namespace dht
