#include "dht/hypothesis.hpp"

#include <cmath>

namespace dht {

HypothesisPair::HypothesisPair(JointPmf p, JointPmf pbar)
    : p_xy(std::move(p)), pbar_xy(std::move(pbar)) {
  if (p_xy.nx() != pbar_xy.nx() || p_xy.ny() != pbar_xy.ny())
    throw std::invalid_argument("HypothesisPair: alphabet mismatch");
  p_x_ = p_xy.marginal_x();
  pbar_x_ = pbar_xy.marginal_x();
  if (!p_x_.support_intersects(pbar_x_))
    throw std::invalid_argument("HypothesisPair: disjoint X supports");
  if (!p_xy.marginal_y().support_intersects(pbar_xy.marginal_y()))
    throw std::invalid_argument("HypothesisPair: disjoint Y supports");
  p_cond_ = p_xy.conditional_y_given_x();
  pbar_cond_ = pbar_xy.conditional_y_given_x();
}

HypothesisPair HypothesisPair::from_channels(const Pmf& px,
                                             const Channel& p_y_given_x,
                                             const Pmf& pbar_x,
                                             const Channel& pbar_y_given_x) {
  return HypothesisPair(JointPmf::from_marginal_channel(px, p_y_given_x),
                        JointPmf::from_marginal_channel(pbar_x, pbar_y_given_x));
}

HypothesisPair HypothesisPair::binary_example() {
  Pmf uniform = Pmf::uniform(2);
  return from_channels(uniform, Channel::bsc(0.1), uniform, Channel::bsc(0.01));
}

double chernoff_symbol_lambda(std::size_t x, std::size_t xt, double lambda,
                              const Channel& p, const Channel& pbar) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("chernoff_symbol: lambda outside [0,1]");
  if (p.outputs() != pbar.outputs())
    throw std::invalid_argument("chernoff_symbol: output alphabets differ");
  double s = 0.0;
  for (std::size_t y = 0; y < p.outputs(); ++y)
    s += pow_frac(p(x, y), 1.0 - lambda) * pow_frac(pbar(xt, y), lambda);
  if (s <= 0.0) return kInf;
  return -std::log(s);
}

double chernoff_symbol(std::size_t x, std::size_t xt, double tau,
                       const HypothesisPair& pair) {
  if (tau < 0.0) throw std::invalid_argument("chernoff_symbol: tau < 0");
  return chernoff_symbol_lambda(x, xt, tau_to_lambda(tau), pair.p_y_given_x(),
                                pair.pbar_y_given_x());
}

double chernoff_avg_lambda(const JointPmf& q_xxt, double lambda,
                           const HypothesisPair& pair) {
  double d = 0.0;
  for (std::size_t x = 0; x < q_xxt.nx(); ++x)
    for (std::size_t xt = 0; xt < q_xxt.ny(); ++xt) {
      double w = q_xxt(x, xt);
      if (w <= 0.0) continue;
      double v = chernoff_symbol_lambda(x, xt, lambda, pair.p_y_given_x(),
                                        pair.pbar_y_given_x());
      if (v == kInf) return kInf;
      d += w * v;
    }
  return d;
}

double chernoff_avg(const JointPmf& q_xxt, double tau, const HypothesisPair& pair) {
  if (tau < 0.0) throw std::invalid_argument("chernoff_avg: tau < 0");
  return chernoff_avg_lambda(q_xxt, tau_to_lambda(tau), pair);
}

double chernoff_diag_lambda(const Pmf& q_x, double lambda,
                            const HypothesisPair& pair) {
  double d = 0.0;
  for (std::size_t x = 0; x < q_x.size(); ++x) {
    if (q_x[x] <= 0.0) continue;
    double v = chernoff_symbol_lambda(x, x, lambda, pair.p_y_given_x(),
                                      pair.pbar_y_given_x());
    if (v == kInf) return kInf;
    d += q_x[x] * v;
  }
  return d;
}

double chernoff_diag(const Pmf& q_x, double tau, const HypothesisPair& pair) {
  if (tau < 0.0) throw std::invalid_argument("chernoff_diag: tau < 0");
  return chernoff_diag_lambda(q_x, tau_to_lambda(tau), pair);
}

double chernoff_distance(const Pmf& p, const Pmf& pbar, double tau) {
  if (tau < 0.0) throw std::invalid_argument("chernoff_distance: tau < 0");
  if (p.size() != pbar.size())
    throw std::invalid_argument("chernoff_distance: dimension mismatch");
  double lambda = tau_to_lambda(tau);
  double s = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z)
    s += pow_frac(p[z], 1.0 - lambda) * pow_frac(pbar[z], lambda);
  if (s <= 0.0) return kInf;
  return -std::log(s);
}

}  // namespace dht
