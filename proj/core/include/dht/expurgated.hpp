#pragma once

#include "dht/hypothesis.hpp"
#include "dht/solver_common.hpp"

namespace dht {

struct BexReport {
  double value = 0.0;
  JointPmf witness_coupling;  // over X x Xtilde
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;
  SolveMethod method = SolveMethod::mirror_descent;
};

// True objective (tau+1)*( d_tau(Q) + R - H_Q(X|Xt) ) at a coupling.
double bex_objective(double rate, double tau, const HypothesisPair& pair,
                     const JointPmf& coupling);

/// Expurgated exponent: (tau+1) * min over couplings Q_XXt with both
/// marginals equal to q_x and H_Q(X|Xt) >= R of { d_tau(Q) + R - H_Q(X|Xt) }.
/// Convex program; solved by mirror descent with augmented-Lagrangian
/// marginal constraints and an ALM hinge for the entropy inequality.
/// Throws when R > H(q_x) (infeasible).
BexReport solve_bex(double rate, const Pmf& q_x, double tau,
                    const HypothesisPair& pair, const SolveOptions& opt = {});

// One-parameter exhaustive scan for binary alphabets (test oracle): the
// couplings with both marginals fixed form a segment.
double bex_grid_binary(double rate, const Pmf& q_x, double tau,
                       const HypothesisPair& pair, int resolution = 200);

}  // namespace dht
