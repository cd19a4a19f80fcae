#pragma once

#include "dht/hypothesis.hpp"
#include "dht/solver_common.hpp"

namespace dht {

/// Pure-binning random-coding exponent (no quantization): minimum over
/// (Q_XY, Qbar_XY) with both X-marginals pinned to q_x and Q_Y = Qbar_Y of
///   tau*D(Q_{Y|X}||P_{Y|X}|Q_X) + D(Qbar_{Y|X}||Pbar_{Y|X}|Qbar_X)
///   + |R - H_Q(X|Y)|_+ + tau*|R - H_Qbar(X|Y)|_+.
/// Direct evaluation of the degenerate-U special case; used to cross-check
/// the reduction of the general program.
double binned_brc(double rate, const Pmf& q_x, double tau,
                  const HypothesisPair& pair, const SolveOptions& opt = {});

/// Zero-rate bound: min over (Q_XY, Qbar_XY) with Q_X = Qbar_X, Q_Y = Qbar_Y
/// and D(Q_XY||P_XY) <= E1 of D(Qbar_XY||Pbar_XY).
double zero_rate_bound(double e1, const HypothesisPair& pair,
                       const SolveOptions& opt = {});

// Exhaustive coupling-grid oracle for the zero-rate program (binary-scale).
double zero_rate_bound_grid(double e1, const HypothesisPair& pair,
                            int resolution);

}  // namespace dht
