#include "dht/tau_grid.hpp"

namespace dht {

std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi, int iters) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

std::pair<double, double> grid_refine_max(const std::function<double(double)>& f,
                                          const std::vector<double>& grid,
                                          int refine_iters) {
  std::size_t best = 0;
  double best_val = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double v = f(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (refine_iters <= 0 || grid.size() < 2) return {grid[best], best_val};
  double lo = best == 0 ? grid[0] : grid[best - 1];
  double hi = best + 1 == grid.size() ? grid.back() : grid[best + 1];
  auto [x, v] = golden_max(f, lo, hi, refine_iters);
  if (v > best_val) return {x, v};
  return {grid[best], best_val};
}

}  // namespace dht
