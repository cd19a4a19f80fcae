#include "dht/solver_common.hpp"

#include <algorithm>
#include <cmath>

namespace dht::solver_detail {

void mirror_step(const std::vector<double>& x, const std::vector<double>& g,
                 const std::vector<char>& mask, double eta,
                 std::vector<double>& out) {
  out.resize(x.size());
  double shift = kInf;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mask[i]) shift = std::min(shift, eta * g[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!mask[i]) {
      out[i] = 0.0;
      continue;
    }
    double v = std::max(x[i], 1e-300) * std::exp(-(eta * g[i] - shift));
    out[i] = v;
    sum += v;
  }
  for (double& v : out) v /= sum;
}

double block_residual(const std::vector<double>& x, const std::vector<double>& g) {
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += x[i] * g[i];
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += x[i] * std::abs(g[i] - mean);
  return r;
}

std::vector<double> random_simplex(const std::vector<char>& mask, CounterRng& rng) {
  std::vector<double> v(mask.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    // Exp(1) variates normalize to Dirichlet(1).
    double u = std::max(rng.uniform01(), 1e-12);
    v[i] = -std::log(u);
    sum += v[i];
  }
  for (double& x : v) x /= sum;
  return v;
}

double smooth_max(const std::vector<double>& args, double beta,
                  std::vector<double>* weights) {
  double mx = -kInf;
  for (double a : args) mx = std::max(mx, a);
  double sum = 0.0;
  std::vector<double> w(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    w[i] = std::exp((args[i] - mx) / beta);
    sum += w[i];
  }
  if (weights) {
    weights->resize(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) (*weights)[i] = w[i] / sum;
  }
  return mx + beta * std::log(sum);
}

double hard_max(const std::vector<double>& args) {
  double mx = -kInf;
  for (double a : args) mx = std::max(mx, a);
  return mx;
}

}  // namespace dht::solver_detail
