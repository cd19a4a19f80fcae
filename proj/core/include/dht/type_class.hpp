#pragma once

#include <cstdint>
#include <vector>

#include "dht/common.hpp"
#include "dht/pmf.hpp"

namespace dht {

using u128 = unsigned __int128;

// Empirical distribution of a length-n sequence, as integer counts.
struct TypeDescriptor {
  std::vector<int> counts;
  int n = 0;

  TypeDescriptor() = default;
  TypeDescriptor(std::vector<int> counts_, int n_);

  std::size_t alphabet() const { return counts.size(); }
  Pmf pmf() const;

  static TypeDescriptor of_sequence(const std::vector<int>& seq,
                                    std::size_t alphabet);
};

bool operator==(const TypeDescriptor& a, const TypeDescriptor& b);

// Exact multinomial coefficient n! / prod(counts!). Throws on 128-bit
// overflow (cannot happen for n <= 64).
u128 multinomial(const std::vector<int>& counts);

u128 type_class_size(const TypeDescriptor& t);

double u128_to_double(u128 v);

// All sequences with the given type, each exactly once (lexicographic).
// Guarded: throws SizeGuardError when the class has more than `limit`
// members.
std::vector<std::vector<int>> type_enumerate(const TypeDescriptor& t,
                                             u128 limit = (u128(1) << 24));

// Joint type of a pair of aligned sequences, over the product alphabet
// (index = x * ny + y).
TypeDescriptor joint_type(const std::vector<int>& xs, const std::vector<int>& ys,
                          std::size_t nx, std::size_t ny);

// Joint type of an aligned triple, over u * (nx*ny) + x * ny + y.
TypeDescriptor joint_type3(const std::vector<int>& us, const std::vector<int>& xs,
                           const std::vector<int>& ys, std::size_t nu,
                           std::size_t nx, std::size_t ny);

}  // namespace dht
