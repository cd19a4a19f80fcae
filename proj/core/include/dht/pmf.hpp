#pragma once

#include <cstddef>
#include <vector>

#include "dht/common.hpp"

namespace dht {

/// A probability mass function on a finite alphabet.
///
/// Construction accepts any nonnegative vector whose sum is within 1e-9 of
/// one and renormalizes it exactly; anything else is rejected. Querying a
/// zero-probability symbol is valid.
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t size);
  // Point mass on `symbol`.
  static Pmf degenerate(std::size_t size, std::size_t symbol);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  std::vector<std::size_t> support() const;
  bool support_subset_of(const Pmf& other) const;
  bool support_intersects(const Pmf& other) const;

  double entropy() const;  // nats

 private:
  std::vector<double> probs_;
};

// Kullback-Leibler divergence in nats; +inf iff supp(q) is not contained in
// supp(p). Throws on dimension mismatch.
double kl(const Pmf& q, const Pmf& p);

double total_variation(const Pmf& a, const Pmf& b);

/// A row-stochastic matrix; row x is a Pmf over the output alphabet.
class Channel {
 public:
  Channel() = default;
  Channel(std::size_t inputs, std::size_t outputs);
  explicit Channel(std::vector<std::vector<double>> rows);

  // Binary symmetric channel with the given crossover probability.
  static Channel bsc(double crossover);

  std::size_t inputs() const { return rows_.size(); }
  std::size_t outputs() const { return rows_.empty() ? 0 : rows_[0].size(); }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  const Pmf& row(std::size_t x) const { return rows_[x]; }

 private:
  std::vector<Pmf> rows_;
};

// Sum_x weight(x) * kl(q.row(x), p.row(x)); rows with zero weight are
// ignored even if their divergence would be infinite.
double conditional_kl(const Channel& q, const Channel& p, const Pmf& weight);

}  // namespace dht
