#include "dht/pmf.hpp"

#include <algorithm>
#include <numeric>

namespace dht {

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("Pmf: negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("Pmf: entries sum to " + std::to_string(sum));
  for (double& p : probs_) p /= sum;
}

Pmf Pmf::uniform(std::size_t size) {
  return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::degenerate(std::size_t size, std::size_t symbol) {
  std::vector<double> v(size, 0.0);
  v.at(symbol) = 1.0;
  return Pmf(std::move(v));
}

std::vector<std::size_t> Pmf::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (probs_[i] > 0.0) s.push_back(i);
  return s;
}

bool Pmf::support_subset_of(const Pmf& other) const {
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (probs_[i] > 0.0 && other[i] <= 0.0) return false;
  return true;
}

bool Pmf::support_intersects(const Pmf& other) const {
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (probs_[i] > 0.0 && other[i] > 0.0) return true;
  return false;
}

double Pmf::entropy() const {
  double h = 0.0;
  for (double p : probs_) h -= xlogx(p);
  return std::max(0.0, h);
}

double kl(const Pmf& q, const Pmf& p) {
  if (q.size() != p.size()) throw std::invalid_argument("kl: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double t = xlogratio(q[i], p[i]);
    if (t == kInf) return kInf;
    d += t;
  }
  return std::max(0.0, d);
}

double total_variation(const Pmf& a, const Pmf& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

Channel::Channel(std::size_t inputs, std::size_t outputs) {
  rows_.assign(inputs, Pmf::uniform(outputs));
}

Channel::Channel(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("Channel: no rows");
  std::size_t cols = rows[0].size();
  rows_.reserve(rows.size());
  for (auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("Channel: ragged rows");
    rows_.emplace_back(std::move(r));
  }
}

Channel Channel::bsc(double crossover) {
  if (crossover < 0.0 || crossover > 1.0)
    throw std::invalid_argument("bsc: crossover outside [0,1]");
  return Channel({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

double conditional_kl(const Channel& q, const Channel& p, const Pmf& weight) {
  if (q.inputs() != p.inputs() || q.outputs() != p.outputs() ||
      weight.size() != q.inputs())
    throw std::invalid_argument("conditional_kl: shape mismatch");
  double d = 0.0;
  for (std::size_t x = 0; x < q.inputs(); ++x) {
    if (weight[x] <= 0.0) continue;
    double row = kl(q.row(x), p.row(x));
    if (row == kInf) return kInf;
    d += weight[x] * row;
  }
  return d;
}

}  // namespace dht
