#pragma once

#include <vector>

#include "dht/hypothesis.hpp"
#include "dht/np_exact.hpp"
#include "dht/type_class.hpp"

namespace dht {

/// A channel-detection code: distinct sequences from one type class, with an
/// optional cloud-center sequence attached per codeword.
struct CdCode {
  int n = 0;
  std::vector<std::vector<int>> codewords;
  std::vector<std::vector<int>> clouds;  // empty, or aligned with codewords

  // Enforces distinctness and the single-type-class invariant (and, when
  // clouds are present, a single joint (U,X) type).
  void validate(std::size_t alphabet_x, std::size_t alphabet_u = 0) const;

  static CdCode single(std::vector<int> codeword);
};

// |Y|^n enumeration guard shared by the exact-lab routines.
void check_output_space(std::size_t ny, int n);

/// Exact induced output distribution P^{(C)}(y^n) = (1/|C|) sum_{x in C}
/// prod_i P(y_i | x_i), indexed by the base-|Y| integer encoding of y^n
/// (first letter most significant).
std::vector<long double> induced_distribution(const CdCode& code,
                                              const Channel& channel);

/// Exact error probabilities of the optimal CD threshold test
///   sum_C P(y|x)  vs  e^{nT} sum_C Pbar(y|x),
/// randomized with eta at equality.
NpResult cd_np_exact(const CdCode& code, const HypothesisPair& pair,
                     double threshold, double eta);

/// (1/n) log sum_y [P^(C)]^{1-lambda} [Pbar^(C)]^lambda  (nonpositive; its
/// negation is the empirical Chernoff exponent of the code).
double chernoff_parameter_exact(const CdCode& code, const HypothesisPair& pair,
                                double lambda);

// Apply a permutation to a sequence: out[i] = seq[perm[i]].
std::vector<int> permute_sequence(const std::vector<int>& seq,
                                  const std::vector<std::size_t>& perm);

}  // namespace dht
