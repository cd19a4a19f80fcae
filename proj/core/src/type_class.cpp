#include "dht/type_class.hpp"

#include <algorithm>
#include <limits>

namespace dht {

TypeDescriptor::TypeDescriptor(std::vector<int> counts_, int n_)
    : counts(std::move(counts_)), n(n_) {
  int sum = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("TypeDescriptor: negative count");
    sum += c;
  }
  if (sum != n) throw std::invalid_argument("TypeDescriptor: counts do not sum to n");
}

Pmf TypeDescriptor::pmf() const {
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return Pmf(std::move(p));
}

TypeDescriptor TypeDescriptor::of_sequence(const std::vector<int>& seq,
                                           std::size_t alphabet) {
  std::vector<int> c(alphabet, 0);
  for (int s : seq) {
    if (s < 0 || static_cast<std::size_t>(s) >= alphabet)
      throw std::invalid_argument("of_sequence: symbol out of range");
    ++c[s];
  }
  return TypeDescriptor(std::move(c), static_cast<int>(seq.size()));
}

bool operator==(const TypeDescriptor& a, const TypeDescriptor& b) {
  return a.n == b.n && a.counts == b.counts;
}

namespace {
u128 checked_mul(u128 a, std::uint64_t b) {
  if (b != 0 && a > ~u128(0) / b)
    throw std::overflow_error("multinomial: 128-bit overflow");
  return a * b;
}
}  // namespace

u128 multinomial(const std::vector<int>& counts) {
  // Chain of binomials: each partial product is itself a multinomial, so the
  // divisions below are exact.
  u128 result = 1;
  std::uint64_t seen = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      result = checked_mul(result, ++seen);
      result /= static_cast<std::uint64_t>(i);
    }
  }
  return result;
}

u128 type_class_size(const TypeDescriptor& t) { return multinomial(t.counts); }

double u128_to_double(u128 v) {
  return static_cast<double>(static_cast<long double>(v));
}

std::vector<std::vector<int>> type_enumerate(const TypeDescriptor& t, u128 limit) {
  u128 size = type_class_size(t);
  if (size > limit) throw SizeGuardError("type_enumerate: class too large");
  std::vector<int> seq;
  seq.reserve(t.n);
  for (std::size_t s = 0; s < t.counts.size(); ++s)
    seq.insert(seq.end(), t.counts[s], static_cast<int>(s));
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(size));
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

TypeDescriptor joint_type(const std::vector<int>& xs, const std::vector<int>& ys,
                          std::size_t nx, std::size_t ny) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("joint_type: length mismatch");
  std::vector<int> c(nx * ny, 0);
  for (std::size_t i = 0; i < xs.size(); ++i)
    ++c[static_cast<std::size_t>(xs[i]) * ny + static_cast<std::size_t>(ys[i])];
  return TypeDescriptor(std::move(c), static_cast<int>(xs.size()));
}

TypeDescriptor joint_type3(const std::vector<int>& us, const std::vector<int>& xs,
                           const std::vector<int>& ys, std::size_t nu,
                           std::size_t nx, std::size_t ny) {
  if (us.size() != xs.size() || xs.size() != ys.size())
    throw std::invalid_argument("joint_type3: length mismatch");
  std::vector<int> c(nu * nx * ny, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t idx = (static_cast<std::size_t>(us[i]) * nx +
                       static_cast<std::size_t>(xs[i])) *
                          ny +
                      static_cast<std::size_t>(ys[i]);
    ++c[idx];
  }
  return TypeDescriptor(std::move(c), static_cast<int>(xs.size()));
}

}  // namespace dht
