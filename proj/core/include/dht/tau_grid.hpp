#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace dht {

/// The tau search grid: {0} plus geometric points from tau_min to tau_max,
/// with optional golden-section refinement around the grid argmax.
struct TauGrid {
  double tau_min = 1.0 / 16.0;
  double tau_max = 64.0;
  int geom_points = 21;
  int refine_iters = 48;

  std::vector<double> points() const {
    std::vector<double> g;
    g.push_back(0.0);
    if (geom_points == 1) {
      g.push_back(tau_min);
      return g;
    }
    double ratio = std::pow(tau_max / tau_min,
                            1.0 / static_cast<double>(geom_points - 1));
    double t = tau_min;
    for (int i = 0; i < geom_points; ++i, t *= ratio) g.push_back(t);
    g.back() = tau_max;  // kill accumulated rounding
    return g;
  }
};

// Golden-section maximization on [lo, hi]; returns (argmax, max). Exact for
// unimodal f, a local refinement otherwise.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi, int iters);

// Maximize f over the grid, then refine around the best grid point within
// its bracketing interval. Returns (argmax, max).
std::pair<double, double> grid_refine_max(const std::function<double(double)>& f,
                                          const std::vector<double>& grid,
                                          int refine_iters);

}  // namespace dht
