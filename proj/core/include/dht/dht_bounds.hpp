#pragma once

#include <cstdint>
#include <map>

#include "dht/binned.hpp"
#include "dht/d2.hpp"
#include "dht/expurgated.hpp"
#include "dht/rc_exponents.hpp"
#include "dht/tau_grid.hpp"

namespace dht {

struct OperatingPoint {
  double rate;  // R, nats/symbol
  double e1;    // type-1 exponent constraint, nats
};

// Throughput-oriented solver knobs for grid sweeps; standalone solves keep
// the tighter SolveOptions defaults.
inline SolveOptions sweep_solver_options() {
  SolveOptions o;
  o.max_inner_iters = 220;
  o.max_outer_rounds = 12;
  o.inner_tol = 1e-6;
  o.flat_tol = 1e-8;
  return o;
}

/// Grid and solver knobs for the bound searches.
struct SearchConfig {
  int qx_resolution = 64;      // simplex mesh for Q_X (use ~24 for |X|=3)
  int u_cardinality = 0;       // 0 means |X|+1
  int rb_grid_size = 17;
  int qux_resolution = 6;      // test-channel mesh
  TauGrid tau_grid{};
  bool symmetry_reduction = false;
  bool restrict_qx_ball = true;
  bool refine_qx = true;       // local refinement of the Q_X argmin (|X|=2)
  // Sweeps use a fixed R_b mesh on [0, H(Q_U)] filtered by the lower bound,
  // so feasible sets are nested across R and monotonicity is structural.
  bool fixed_rb_grid = true;
  bool force_pure_binning = false;  // |U|=1, R_b = H(Q_X)-R
  bool skip_expurgated = false;     // random-coding branch only
  int sweep_multistarts = 0;  // warm + deterministic starts only
  SolveOptions solver = sweep_solver_options();
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

struct BCombinedResult {
  double value = -kInf;
  double b_ex = -kInf;
  int best_qux = -1;      // index into the searched test-channel grid; -1 = expurgated
  double best_rb = -1.0;
  bool capped = false;    // search stopped once `cap` was exceeded
};

// Warm-start pool reused across b_combined calls that share (Q_X, grids) --
// e.g. a tau sweep at one grid point. Keyed by (channel index, rb index).
struct BCombinedCache {
  std::map<std::pair<int, int>, WarmState> prime;
  std::map<std::pair<int, int>, WarmState> dblprime;
};

/// B(R, Q_X, tau): max of the expurgated branch and the random-coding branch
/// over the test-channel and binning-rate grids. If `cap` is finite the
/// search stops as soon as the running maximum reaches it (the caller only
/// needs min{cap, B}).
BCombinedResult b_combined(double rate, const Pmf& q_x, double tau,
                           const HypothesisPair& pair, const SearchConfig& cfg,
                           double cap = kInf, BCombinedCache* cache = nullptr);

// min{ (tau+1) d_tau(Q_X), B(R, Q_X, tau) } - the inner bracket of the
// achievability bound.
double theorem2_inner(double rate, const Pmf& q_x, double tau,
                      const HypothesisPair& pair, const SearchConfig& cfg,
                      BCombinedCache* cache = nullptr);

struct E2LowerResult {
  double value = 0.0;
  Pmf witness_qx;
  double witness_tau = 0.0;
};

/// Achievable bound on the infimum DHT reliability: min over Q_X of
///   sup_tau [ -tau E1 + D(Q_X||Pbar_X) + tau D(Q_X||P_X)
///             + min{(tau+1) d_tau(Q_X), B(R,Q_X,tau)} ].
/// Internally assembled per Q_X through the CD composition (the f2 core).
E2LowerResult e2_lower(const OperatingPoint& op, const HypothesisPair& pair,
                       const SearchConfig& cfg);

// Converse: min over Q_XY with D(Q_XY||P_XY) <= E1 of D(Q_XY||Pbar_XY),
// computed on the product alphabet with the ordinary-HT machinery.
double e2_converse(const OperatingPoint& op, const HypothesisPair& pair);

/// CD reliability lower bound: max over lambda in (0,1] of
///   -((1-lambda)/lambda) F1 + (1/lambda) min[ d_lambda(Q_X),
///        max{ sup A_rc, A_ex } ].
/// Preconditions: rho in [0, H(Q_X)).
double f2_lower(double rho, const Pmf& q_x, double f1,
                const HypothesisPair& pair, const SearchConfig& cfg);

struct SteinLowerResult {
  double value = 0.0;        // Corollary: D(P_X||Pbar_X) + sup_tau min{...}
  double weak_value = 0.0;   // random-coding-only form at large tau
  double weak_first_term = 0.0;  // D(P_XY || P_X x Pbar_{Y|X})
  bool tau_flat = true;      // large-tau flatness check passed
};

SteinLowerResult stein_lower(double rate, const HypothesisPair& pair,
                             const SearchConfig& cfg);

struct NoLossResult {
  bool holds = false;
  double worst_margin = 0.0;  // min over the grids of B - d_tau
  Pmf worst_qx;
  double worst_tau = 0.0;
};

// Corollary-3 condition B(R, Q_X, tau) >= d_tau(Q_X) over the cfg grids.
NoLossResult no_loss_check(double rate, const HypothesisPair& pair,
                           const SearchConfig& cfg);

// The Q_X search mesh: simplex grid (plus P_X itself), optionally restricted
// to the divergence ball {D(Q_X||P_X) <= e1}.
std::vector<Pmf> qx_grid(const HypothesisPair& pair, const SearchConfig& cfg,
                         double e1_ball);

// Test channels Q_{U|X} on the mesh; the symmetric reduction (|X|=2,
// |U| in {2,3}) searches swap-symmetric channels only.
std::vector<Channel> qux_grid(std::size_t nx, std::size_t nu, int resolution,
                              bool symmetric);

}  // namespace dht
