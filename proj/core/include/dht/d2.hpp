#pragma once

#include "dht/hypothesis.hpp"
#include "dht/pmf.hpp"
#include "dht/tau_grid.hpp"

namespace dht {

// Stein's exponent D(P||Pbar); +inf when supp(P) is not within supp(Pbar).
double stein(const Pmf& p, const Pmf& pbar);

/// D2(D1) = min { D(Q||Pbar) : D(Q||P) <= D1 }.
///
/// The minimizer lies on the exponential-family geodesic Q_s ~ P^{1-s} Pbar^s,
/// so this solves a one-dimensional root find for D(Q_s||P) = D1 (bisection,
/// tol 1e-9) on the common support; the inactive-constraint and infeasible
/// regimes are handled in closed form. `grid_resolution` controls the simplex
/// grid fallback used if the bracketing degenerates.
double d2_primal(const Pmf& p, const Pmf& pbar, double d1,
                 int grid_resolution = 400);

// Exhaustive simplex-grid evaluation of the same program. Test oracle and
// fallback path.
double d2_primal_grid(const Pmf& p, const Pmf& pbar, double d1, int resolution);

// Dual (Chernoff) form: sup_{tau >= 0} { -tau*D1 + (tau+1)*d_tau }.
// The tau -> inf limit is taken analytically (it only matters at D1 = 0,
// where the value is D(P||Pbar)).
double d2_chernoff(const Pmf& p, const Pmf& pbar, double d1,
                   const TauGrid& grid = TauGrid{});

// Critical point: the curve is flat for D1 beyond D(Pbar||P).
inline double d2_critical_point(const Pmf& p, const Pmf& pbar) {
  return kl(pbar, p);
}

/// A computed trade-off curve with optimizer witnesses per point.
struct TradeoffPoint {
  double abscissa = 0.0;  // nats
  double ordinate = 0.0;  // nats
  double tau_star = -1.0;
  double s_star = -1.0;
  bool past_critical = false;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  // Enforces strictly increasing abscissae and nonincreasing ordinates
  // (up to `slack` for grid noise).
  void validate(double slack = 1e-9) const;
};

}  // namespace dht
