#include "dht/d2.hpp"

#include <algorithm>
#include <cmath>

namespace dht {

double stein(const Pmf& p, const Pmf& pbar) { return kl(p, pbar); }

namespace {

// Normalized geodesic point P^{1-s} Pbar^s restricted to the common support.
Pmf geodesic_point(const Pmf& p, const Pmf& pbar, double s,
                   const std::vector<std::size_t>& common) {
  std::vector<double> q(p.size(), 0.0);
  // log-domain for numerical range
  double mx = -kInf;
  std::vector<double> lg(common.size());
  for (std::size_t k = 0; k < common.size(); ++k) {
    std::size_t z = common[k];
    lg[k] = (1.0 - s) * std::log(p[z]) + s * std::log(pbar[z]);
    mx = std::max(mx, lg[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < common.size(); ++k) sum += std::exp(lg[k] - mx);
  for (std::size_t k = 0; k < common.size(); ++k)
    q[common[k]] = std::exp(lg[k] - mx) / sum;
  return Pmf(std::move(q));
}

}  // namespace

double d2_primal(const Pmf& p, const Pmf& pbar, double d1, int grid_resolution) {
  if (p.size() != pbar.size())
    throw std::invalid_argument("d2_primal: dimension mismatch");
  if (d1 < 0.0) throw std::invalid_argument("d2_primal: D1 < 0 is infeasible");

  std::vector<std::size_t> common;
  for (std::size_t z = 0; z < p.size(); ++z)
    if (p[z] > 0.0 && pbar[z] > 0.0) common.push_back(z);
  if (common.empty()) return kInf;

  // Unconstrained-optimum check: Pbar conditioned on the common support.
  Pmf q1 = geodesic_point(p, pbar, 1.0, common);
  if (kl(q1, p) <= d1) return kl(q1, pbar);

  Pmf q0 = geodesic_point(p, pbar, 0.0, common);
  double g0 = kl(q0, p);
  if (d1 < g0 - 1e-13) return kInf;  // no feasible Q with finite objective
  if (d1 <= g0) return kl(q0, pbar);

  // Bisection for D(Q_s||P) = d1 on [0,1].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    Pmf qm = geodesic_point(p, pbar, mid, common);
    double g = kl(qm, p);
    if (std::abs(g - d1) <= 1e-13 * std::max(1.0, d1)) {
      lo = hi = mid;
      break;
    }
    (g < d1 ? lo : hi) = mid;
    if (hi - lo < 1e-15) break;
  }
  double s = 0.5 * (lo + hi);
  Pmf qs = geodesic_point(p, pbar, s, common);
  double val = kl(qs, pbar);
  if (std::isfinite(val)) return std::max(0.0, val);
  // Degenerate bracketing; fall back to the simplex grid.
  return d2_primal_grid(p, pbar, d1, grid_resolution);
}

namespace {

// Recursively walk the integer simplex {c : sum c = res} scaled by 1/res.
template <typename Fn>
void for_each_grid_pmf(std::size_t dim, int res, std::vector<int>& c,
                       std::size_t at, int left, Fn&& fn) {
  if (at + 1 == dim) {
    c[at] = left;
    fn(c);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    c[at] = v;
    for_each_grid_pmf(dim, res, c, at + 1, left - v, fn);
  }
}

}  // namespace

double d2_primal_grid(const Pmf& p, const Pmf& pbar, double d1, int resolution) {
  double best = kInf;
  std::vector<int> c(p.size(), 0);
  for_each_grid_pmf(p.size(), resolution, c, 0, resolution, [&](const std::vector<int>& cc) {
    std::vector<double> q(cc.size());
    for (std::size_t i = 0; i < cc.size(); ++i)
      q[i] = static_cast<double>(cc[i]) / static_cast<double>(resolution);
    Pmf qq(std::move(q));
    if (kl(qq, p) <= d1) best = std::min(best, kl(qq, pbar));
  });
  return best;
}

double d2_chernoff(const Pmf& p, const Pmf& pbar, double d1, const TauGrid& grid) {
  auto objective = [&](double tau) {
    double d = chernoff_distance(p, pbar, tau);
    if (d == kInf) return -kInf;
    return -tau * d1 + (tau + 1.0) * d;
  };
  auto [tau_star, best] = grid_refine_max(objective, grid.points(), grid.refine_iters);
  (void)tau_star;
  if (d1 == 0.0) best = std::max(best, stein(p, pbar));
  return std::max(0.0, best);
}

void TradeoffCurve::validate(double slack) const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].abscissa > points[i - 1].abscissa))
      throw std::logic_error("TradeoffCurve: abscissae not strictly increasing");
    if (points[i].ordinate > points[i - 1].ordinate + slack)
      throw std::logic_error("TradeoffCurve: ordinates increase");
  }
}

}  // namespace dht
