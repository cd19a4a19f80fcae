#pragma once

#include <cstdint>
#include <vector>

#include "dht/common.hpp"
#include "dht/rng.hpp"

namespace dht {

enum class SolveMethod { geodesic, mirror_descent, grid, grid_refined };

/// Knobs of the entropic mirror-descent / augmented-Lagrangian engine.
struct SolveOptions {
  int multistarts = 8;         // random starts beyond the deterministic one
  std::uint64_t seed = 1;
  double inner_tol = 1e-7;     // stationarity residual target
  double outer_tol = 1e-7;     // coupling violation target (TV)
  int max_inner_iters = 800;
  int max_outer_rounds = 24;
  double beta_start = 1e-1;    // softmax temperature annealing
  double beta_end = 1e-4;
  // Sweep mode: when a warm start converges, skip the remaining starts.
  bool trust_warm_start = false;
  // Inner loop exits after 5 consecutive steps whose relative progress is
  // below this threshold.
  double flat_tol = 1e-13;
};

using ChannelMatrix = std::vector<std::vector<double>>;

namespace solver_detail {

// One multiplicative (exponentiated-gradient) step on a simplex block;
// entries outside the mask stay zero.
void mirror_step(const std::vector<double>& x, const std::vector<double>& g,
                 const std::vector<char>& mask, double eta,
                 std::vector<double>& out);

// sum_i x_i |g_i - <x,g>| : stationarity measure of one simplex block.
double block_residual(const std::vector<double>& x, const std::vector<double>& g);

// Dirichlet(1) sample on the masked support.
std::vector<double> random_simplex(const std::vector<char>& mask, CounterRng& rng);

// Smoothed max: beta * log sum exp(a_i / beta); weights get the softmax.
double smooth_max(const std::vector<double>& args, double beta,
                  std::vector<double>* weights);

double hard_max(const std::vector<double>& args);

}  // namespace solver_detail

}  // namespace dht
