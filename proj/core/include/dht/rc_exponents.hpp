#pragma once

#include <optional>

#include "dht/hypothesis.hpp"
#include "dht/joint.hpp"
#include "dht/solver_common.hpp"

namespace dht {

/// One random-coding exponent evaluation: rates, test-channel joint, tau and
/// the hypothesis pair.
struct RcProblem {
  double rate;      // R, nats
  double rb;        // binning rate R_b, nats
  JointPmf q_ux;    // joint over U x X (U-rows)
  double tau;      // >= 0
  HypothesisPair pair;

  RcProblem(double rate_, double rb_, JointPmf q_ux_, double tau_,
            HypothesisPair pair_);
};

struct SolveReport {
  double value = 0.0;  // +inf sentinel possible
  JointTriple witness_q;
  JointTriple witness_qbar;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;  // total variation over the coupling
  SolveMethod method = SolveMethod::mirror_descent;
  // Relaxed-optimizer I(U;Y), filled by the double-prime three-step rule.
  double relaxed_i_uy = -1.0;
  // Work counters of the winning start (diagnostics).
  long total_inner_iters = 0;
  int outer_rounds = 0;
};

// True (nonsmooth) objectives at a given witness pair; no feasibility check.
double brc_prime_objective(const RcProblem& p, const JointTriple& q,
                           const JointTriple& qbar);
double brc_doubleprime_objective(const RcProblem& p, const JointTriple& q,
                                 const JointTriple& qbar);

/// Minimum over coupled (Q_UXY, Qbar_UXY) with Q_Y = Qbar_Y of the
/// random-coding objective. Entropic mirror descent with augmented-Lagrangian
/// coupling and annealed softmax smoothing of the max terms; the reported
/// value is the true nonsmooth objective at the witness.
SolveReport solve_brc_prime(const RcProblem& p, const SolveOptions& opt = {});

/// Three-step rule: solve the double-prime program without the open
/// constraint I_Q(U;Y) > R_b (convex); keep the value iff the relaxed
/// optimizer satisfies the constraint, else +inf.
SolveReport solve_brc_doubleprime(const RcProblem& p, const SolveOptions& opt = {});

// min of the two; ties (within 1e-12) go to the prime branch.
SolveReport solve_brc(const RcProblem& p, const SolveOptions& opt = {});

// Warm-startable variants for sweeps.
SolveReport solve_brc_prime(const RcProblem& p, const SolveOptions& opt,
                            const std::optional<std::pair<ChannelMatrix, ChannelMatrix>>& init);
SolveReport solve_brc_doubleprime(const RcProblem& p, const SolveOptions& opt,
                                  const std::optional<std::pair<ChannelMatrix, ChannelMatrix>>& init);

/// Full solver state carried between neighboring solves of a sweep: the
/// witness channels plus the augmented-Lagrangian multipliers and penalty.
struct WarmState {
  ChannelMatrix q, qb;
  std::vector<double> mu;
  double pen = 0.0;
  bool valid = false;
};

SolveReport solve_brc_prime_warm(const RcProblem& p, const SolveOptions& opt,
                                 WarmState& state);
SolveReport solve_brc_doubleprime_warm(const RcProblem& p, const SolveOptions& opt,
                                       WarmState& state);

// R_b sweeps with shared witnesses: values are polished through the common
// witness pool, which makes the exact monotonicity of the underlying
// functions (prime nonincreasing, double-prime nondecreasing) hold for the
// computed values as well.
std::vector<double> solve_brc_prime_sweep(const RcProblem& base,
                                          const std::vector<double>& rb_values,
                                          const SolveOptions& opt = {});
std::vector<double> solve_brc_doubleprime_sweep(const RcProblem& base,
                                                const std::vector<double>& rb_values,
                                                const SolveOptions& opt = {});

/// Bucketed conditional-channel grid minimization (the test oracle and the
/// always-available fallback). Rows of both channels run over the integer
/// simplex grid of the given resolution; the coupling is met by pairing
/// marginal buckets and repairing the second channel with iterative
/// proportional fitting before the exact objective is evaluated.
struct GridOptions {
  int resolution = 24;
  int bucket_scale = 4;   // bucket width = 1 / (bucket_scale * resolution)
  int ipf_iters = 200;
  int local_refine = 4;   // re-mesh factor around the coarse argmin (0 = off)
};

double brc_prime_grid(const RcProblem& p, const GridOptions& opt = {});
// The double-prime program on the grid, with the open constraint
// I_Q(U;Y) > R_b enforced exactly on the first channel. +inf when the
// constrained feasible set on the grid is empty.
double brc_doubleprime_grid_constrained(const RcProblem& p,
                                        const GridOptions& opt = {});

}  // namespace dht
