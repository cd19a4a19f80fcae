#pragma once

#include <utility>

#include "dht/pmf.hpp"
#include "dht/type_class.hpp"

namespace dht {

struct NpResult {
  double p1;  // type 1: P[decide Hbar]
  double p2;  // type 2: Pbar[decide H]
};

/// Exact error probabilities of the randomized Neyman-Pearson threshold test
/// on n i.i.d. observations: decide H when P(z^n) > e^{nT} Pbar(z^n), decide
/// Hbar when <, and decide H with probability eta at equality.
///
/// The likelihood ratio is constant on type classes, so the sum runs over
/// types; n <= 64 keeps the class sizes exact.
NpResult np_exact(const Pmf& p, const Pmf& pbar, int n, double threshold,
                  double eta);

// Brute-force oracle: sums over all |Z|^n sequences. Guarded.
NpResult np_exact_bruteforce(const Pmf& p, const Pmf& pbar, int n,
                             double threshold, double eta);

// All types over `alphabet` symbols at blocklength n.
std::vector<TypeDescriptor> all_types(std::size_t alphabet, int n);

}  // namespace dht
