#include "dht/cd_code.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dht {

void CdCode::validate(std::size_t alphabet_x, std::size_t alphabet_u) const {
  if (codewords.empty()) throw std::invalid_argument("CdCode: empty");
  std::set<std::vector<int>> seen;
  TypeDescriptor t0 = TypeDescriptor::of_sequence(codewords[0], alphabet_x);
  for (const auto& cw : codewords) {
    if (static_cast<int>(cw.size()) != n)
      throw std::invalid_argument("CdCode: wrong codeword length");
    if (!seen.insert(cw).second)
      throw std::invalid_argument("CdCode: duplicate codeword");
    if (!(TypeDescriptor::of_sequence(cw, alphabet_x) == t0))
      throw std::invalid_argument("CdCode: mixed type classes");
  }
  if (!clouds.empty()) {
    if (clouds.size() != codewords.size())
      throw std::invalid_argument("CdCode: clouds misaligned");
    TypeDescriptor j0 =
        joint_type(clouds[0], codewords[0], alphabet_u, alphabet_x);
    for (std::size_t i = 0; i < codewords.size(); ++i) {
      if (!(joint_type(clouds[i], codewords[i], alphabet_u, alphabet_x) == j0))
        throw std::invalid_argument("CdCode: mixed joint (U,X) types");
    }
  }
}

CdCode CdCode::single(std::vector<int> codeword) {
  CdCode c;
  c.n = static_cast<int>(codeword.size());
  c.codewords.push_back(std::move(codeword));
  return c;
}

void check_output_space(std::size_t ny, int n) {
  double total = std::pow(static_cast<double>(ny), n);
  if (total > static_cast<double>(1 << 21))
    throw SizeGuardError("cd_lab: |Y|^n exceeds the desk-scale limit");
}

std::vector<long double> induced_distribution(const CdCode& code,
                                              const Channel& channel) {
  const std::size_t ny = channel.outputs();
  const int n = code.n;
  check_output_space(ny, n);
  const int na = n / 2, nb = n - na;
  const std::size_t ca = static_cast<std::size_t>(std::pow(double(ny), na));
  const std::size_t cb = static_cast<std::size_t>(std::pow(double(ny), nb));

  std::vector<long double> out(ca * cb, 0.0L);
  std::vector<long double> ta(ca), tb(cb);
  for (const auto& cw : code.codewords) {
    // half-products: first na letters are the high digits of the index
    for (std::size_t ia = 0; ia < ca; ++ia) {
      long double p = 1.0L;
      std::size_t rem = ia;
      for (int i = na - 1; i >= 0; --i) {
        p *= channel(cw[i], rem % ny);
        rem /= ny;
      }
      ta[ia] = p;
    }
    for (std::size_t ib = 0; ib < cb; ++ib) {
      long double p = 1.0L;
      std::size_t rem = ib;
      for (int i = nb - 1; i >= 0; --i) {
        p *= channel(cw[na + i], rem % ny);
        rem /= ny;
      }
      tb[ib] = p;
    }
    for (std::size_t ia = 0; ia < ca; ++ia) {
      if (ta[ia] == 0.0L) continue;
      long double* row = out.data() + ia * cb;
      for (std::size_t ib = 0; ib < cb; ++ib) row[ib] += ta[ia] * tb[ib];
    }
  }
  long double inv = 1.0L / static_cast<long double>(code.codewords.size());
  for (auto& v : out) v *= inv;
  return out;
}

NpResult cd_np_exact(const CdCode& code, const HypothesisPair& pair,
                     double threshold, double eta) {
  std::vector<long double> s = induced_distribution(code, pair.p_y_given_x());
  std::vector<long double> sbar =
      induced_distribution(code, pair.pbar_y_given_x());
  const long double nt = static_cast<long double>(code.n) * threshold;
  const long double inf = std::numeric_limits<long double>::infinity();
  long double p1 = 0.0L, p2 = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0.0L && sbar[i] == 0.0L) continue;
    long double la = s[i] > 0.0L ? std::log(s[i]) : -inf;
    long double lb = sbar[i] > 0.0L ? std::log(sbar[i]) : -inf;
    long double diff = la - lb;
    if (diff < nt) {
      p1 += s[i];  // decide Hbar
    } else if (diff > nt) {
      p2 += sbar[i];  // decide H
    } else {
      p1 += (1.0L - static_cast<long double>(eta)) * s[i];
      p2 += static_cast<long double>(eta) * sbar[i];
    }
  }
  return {static_cast<double>(p1), static_cast<double>(p2)};
}

double chernoff_parameter_exact(const CdCode& code, const HypothesisPair& pair,
                                double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("chernoff_parameter_exact: lambda outside [0,1]");
  std::vector<long double> s = induced_distribution(code, pair.p_y_given_x());
  std::vector<long double> sbar =
      induced_distribution(code, pair.pbar_y_given_x());
  auto fpow = [](long double base, long double e) -> long double {
    if (e == 0.0L) return 1.0L;  // zero exponent erases the factor
    if (base <= 0.0L) return 0.0L;
    return std::pow(base, e);
  };
  long double sum = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i)
    sum += fpow(s[i], 1.0L - static_cast<long double>(lambda)) *
           fpow(sbar[i], static_cast<long double>(lambda));
  return static_cast<double>(std::log(sum) / static_cast<long double>(code.n));
}

std::vector<int> permute_sequence(const std::vector<int>& seq,
                                  const std::vector<std::size_t>& perm) {
  std::vector<int> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = seq[perm[i]];
  return out;
}

}  // namespace dht
