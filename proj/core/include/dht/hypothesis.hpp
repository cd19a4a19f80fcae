#pragma once

#include "dht/joint.hpp"

namespace dht {

/// The problem instance: two joint laws for (X,Y) on shared alphabets.
///
/// The standing assumption (shared support on both marginals) is enforced at
/// construction; conditional views are defined on positive-marginal rows.
struct HypothesisPair {
  JointPmf p_xy;
  JointPmf pbar_xy;

  HypothesisPair(JointPmf p, JointPmf pbar);

  static HypothesisPair from_channels(const Pmf& px, const Channel& p_y_given_x,
                                      const Pmf& pbar_x,
                                      const Channel& pbar_y_given_x);
  // Uniform X under both hypotheses, BSC(0.1) vs BSC(0.01).
  static HypothesisPair binary_example();

  std::size_t nx() const { return p_xy.nx(); }
  std::size_t ny() const { return p_xy.ny(); }

  const Pmf& p_x() const { return p_x_; }
  const Pmf& pbar_x() const { return pbar_x_; }
  const Channel& p_y_given_x() const { return p_cond_; }
  const Channel& pbar_y_given_x() const { return pbar_cond_; }

 private:
  Pmf p_x_, pbar_x_;
  Channel p_cond_, pbar_cond_;
};

// --- Chernoff parameters (nats). ---
//
// Throughout, lambda = 1/(tau+1), so the tau-form weight pair
// (tau/(tau+1), 1/(tau+1)) equals (1-lambda, lambda).

// -log sum_y P(y|x)^{1-lambda} Pbar(y|xt)^{lambda}; +inf when the two rows
// have disjoint supports and lambda is interior.
double chernoff_symbol_lambda(std::size_t x, std::size_t xt, double lambda,
                              const Channel& p, const Channel& pbar);
double chernoff_symbol(std::size_t x, std::size_t xt, double tau,
                       const HypothesisPair& pair);

// E_Q[d_tau(X, Xt)] for a coupling Q over X x X.
double chernoff_avg(const JointPmf& q_xxt, double tau, const HypothesisPair& pair);
double chernoff_avg_lambda(const JointPmf& q_xxt, double lambda,
                           const HypothesisPair& pair);

// Diagonal version, Xt = X.
double chernoff_diag(const Pmf& q_x, double tau, const HypothesisPair& pair);
double chernoff_diag_lambda(const Pmf& q_x, double lambda,
                            const HypothesisPair& pair);

// Chernoff distance between two plain distributions:
// -log sum_z P(z)^{tau/(tau+1)} Pbar(z)^{1/(tau+1)}.
double chernoff_distance(const Pmf& p, const Pmf& pbar, double tau);

inline double tau_to_lambda(double tau) { return 1.0 / (tau + 1.0); }
inline double lambda_to_tau(double lambda) { return (1.0 - lambda) / lambda; }

}  // namespace dht
