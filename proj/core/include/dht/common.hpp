#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dht {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown when an exact enumeration would exceed the desk-scale limits.
class SizeGuardError : public std::runtime_error {
 public:
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

// x * log(x) with the 0*log(0) = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// q * log(q/p); 0*log(0/p) = 0, q*log(q/0) = +inf for q > 0.
inline double xlogratio(double q, double p) {
  if (q <= 0.0) return 0.0;
  if (p <= 0.0) return kInf;
  return q * std::log(q / p);
}

// base^e with the convention base^0 = 1 (even for base 0) and 0^e = 0 for
// e > 0. Used by the Chernoff parameter where a zero exponent must erase
// the factor.
inline double pow_frac(double base, double e) {
  if (e == 0.0) return 1.0;
  if (base <= 0.0) return 0.0;
  return std::exp(e * std::log(base));
}

}  // namespace dht
