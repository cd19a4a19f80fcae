#include "dht/expurgated.hpp"

#include <algorithm>
#include <cmath>

namespace dht {

using solver_detail::block_residual;
using solver_detail::mirror_step;
using solver_detail::random_simplex;

namespace {

// H(X|Xt) of the joint built from rows q(xt|x) weighted by q_x.
double cond_entropy(const Pmf& q_x, const ChannelMatrix& ch,
                    std::vector<double>* m_xt) {
  std::size_t n = q_x.size();
  std::vector<double> m(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t t = 0; t < n; ++t) m[t] += q_x[x] * ch[x][t];
  double h = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t t = 0; t < n; ++t) {
      double j = q_x[x] * ch[x][t];
      if (j > 0.0 && m[t] > 0.0) h -= j * std::log(j / m[t]);
    }
  if (m_xt) *m_xt = std::move(m);
  return std::max(0.0, h);
}

}  // namespace

double bex_objective(double rate, double tau, const HypothesisPair& pair,
                     const JointPmf& coupling) {
  double d = chernoff_avg(coupling, tau, pair);
  if (d == kInf) return kInf;
  // H(X|Xt) from the coupling itself
  Pmf m_xt = coupling.marginal_y();
  double h = 0.0;
  for (std::size_t x = 0; x < coupling.nx(); ++x)
    for (std::size_t t = 0; t < coupling.ny(); ++t) {
      double j = coupling(x, t);
      if (j > 0.0) h -= j * std::log(j / m_xt[t]);
    }
  return (tau + 1.0) * (d + rate - std::max(0.0, h));
}

BexReport solve_bex(double rate, const Pmf& q_x, double tau,
                    const HypothesisPair& pair, const SolveOptions& opt) {
  const std::size_t n = q_x.size();
  if (rate > q_x.entropy() + 1e-12)
    throw std::invalid_argument("solve_bex: R > H(Q_X) is infeasible");
  rate = std::min(rate, q_x.entropy());

  // Pairwise Chernoff parameters; +inf pairs are masked out.
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  std::vector<std::vector<char>> mask(n, std::vector<char>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t t = 0; t < n; ++t) {
      d[x][t] = chernoff_symbol(x, t, tau, pair);
      mask[x][t] = d[x][t] < kInf;
    }

  struct Eval {
    double L;
    double h;
    std::vector<double> m;
    std::vector<double> c;  // marginal residuals
  };
  struct AlState {
    std::vector<double> mu;  // equality multipliers
    double mu_h = 0.0;       // hinge multiplier for R - H <= 0
    double pen = 8.0;
  };

  auto evaluate = [&](const ChannelMatrix& ch, const AlState& al, bool grad,
                      ChannelMatrix* g) -> Eval {
    Eval e;
    e.h = cond_entropy(q_x, ch, &e.m);
    double dterm = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t)
        if (ch[x][t] > 0.0) dterm += q_x[x] * ch[x][t] * d[x][t];
    e.c.resize(n);
    for (std::size_t t = 0; t < n; ++t) e.c[t] = e.m[t] - q_x[t];
    double psi = rate - e.h;  // must end up <= 0
    double hinge = std::max(0.0, psi + al.mu_h / al.pen);
    double L = dterm + rate - e.h;
    for (std::size_t t = 0; t < n; ++t)
      L += al.mu[t] * e.c[t] + 0.5 * al.pen * e.c[t] * e.c[t];
    L += 0.5 * al.pen * hinge * hinge - 0.5 * al.mu_h * al.mu_h / al.pen;
    e.L = L;
    if (grad) {
      g->assign(n, std::vector<double>(n, 0.0));
      for (std::size_t x = 0; x < n; ++x) {
        if (q_x[x] <= 0.0) continue;
        for (std::size_t t = 0; t < n; ++t) {
          if (!mask[x][t]) continue;
          double j = std::max(q_x[x] * ch[x][t], 1e-300);
          double dh = std::log(j / std::max(e.m[t], 1e-300));  // d(-H)/dJ
          double gg = d[x][t] + dh * (1.0 + al.pen * hinge);
          gg += al.mu[t] + al.pen * e.c[t];
          (*g)[x][t] = q_x[x] * gg;
        }
      }
    }
    return e;
  };

  auto run_from = [&](ChannelMatrix ch) {
    AlState al;
    al.mu.assign(n, 0.0);
    double prev_v = kInf;
    double residual = 0.0;
    for (int round = 0; round < opt.max_outer_rounds; ++round) {
      ChannelMatrix g;
      Eval e = evaluate(ch, al, true, &g);
      double eta = 0.25;
      int flat = 0, rejects = 0;
      for (int it = 0; it < opt.max_inner_iters; ++it) {
        ChannelMatrix trial(n);
        for (std::size_t x = 0; x < n; ++x)
          mirror_step(ch[x], g[x], mask[x], eta, trial[x]);
        Eval et = evaluate(trial, al, false, nullptr);
        if (et.L <= e.L + 1e-13) {
          double drop = e.L - et.L;
          ch = std::move(trial);
          e = evaluate(ch, al, true, &g);
          eta = std::min(eta * 1.3, 20.0);
          rejects = 0;
          residual = 0.0;
          for (std::size_t x = 0; x < n; ++x)
            if (q_x[x] > 0.0)
              residual = std::max(residual, block_residual(ch[x], g[x]));
          if (residual <= opt.inner_tol) break;
          flat = drop <= 1e-14 * (1.0 + std::abs(e.L)) ? flat + 1 : 0;
          if (flat >= 4) break;
        } else {
          eta *= 0.5;
          if (eta < 1e-14 || ++rejects > 60) break;
        }
      }
      Eval e2 = evaluate(ch, al, false, nullptr);
      double vmax = 0.0;
      for (double c : e2.c) vmax = std::max(vmax, std::abs(c));
      double psi = rate - e2.h;
      vmax = std::max(vmax, std::max(0.0, psi));
      if (vmax <= opt.outer_tol && residual <= opt.inner_tol) break;
      for (std::size_t t = 0; t < n; ++t) al.mu[t] += al.pen * e2.c[t];
      al.mu_h = std::max(0.0, al.mu_h + al.pen * psi);
      if (vmax > 0.25 * prev_v) al.pen = std::min(al.pen * 2.0, 1e12);
      prev_v = vmax;
    }
    return std::make_pair(ch, residual);
  };

  // Deterministic start: independent coupling (feasible when R <= H).
  ChannelMatrix best_ch;
  double best_val = kInf, best_res = 0.0, best_viol = 0.0;
  auto consider = [&](ChannelMatrix ch0) {
    auto [ch, res] = run_from(std::move(ch0));
    std::vector<double> m;
    double h = cond_entropy(q_x, ch, &m);
    double viol = 0.0;
    for (std::size_t t = 0; t < n; ++t) viol += std::abs(m[t] - q_x[t]);
    viol = 0.5 * viol;
    viol = std::max(viol, std::max(0.0, rate - h));
    if (viol > 1e-4) return;
    double dterm = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t)
        if (ch[x][t] > 0.0) dterm += q_x[x] * ch[x][t] * d[x][t];
    double val = (tau + 1.0) * (dterm + rate - h);
    if (val < best_val) {
      best_val = val;
      best_ch = ch;
      best_res = res;
      best_viol = viol;
    }
  };

  ChannelMatrix indep(n, std::vector<double>(n));
  bool indep_ok = true;
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      indep[x][t] = mask[x][t] ? q_x[t] : 0.0;
      s += indep[x][t];
    }
    if (s <= 0.0) indep_ok = false;
    else
      for (std::size_t t = 0; t < n; ++t) indep[x][t] /= s;
  }
  if (indep_ok) consider(indep);
  for (int s = 1; s <= opt.multistarts; ++s) {
    CounterRng rng(opt.seed, 0x5e5eull + static_cast<std::uint64_t>(s));
    ChannelMatrix ch(n);
    bool ok = true;
    for (std::size_t x = 0; x < n; ++x) {
      bool any = false;
      for (char mm : mask[x]) any |= mm;
      if (!any) {
        ok = false;
        break;
      }
      ch[x] = random_simplex(mask[x], rng);
    }
    if (ok) consider(std::move(ch));
  }

  BexReport rep;
  rep.method = SolveMethod::mirror_descent;
  if (best_val == kInf) {
    rep.value = kInf;
    return rep;
  }
  rep.value = best_val;
  rep.kkt_residual = best_res;
  rep.constraint_violation = best_viol;
  std::vector<std::vector<double>> joint(n, std::vector<double>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t t = 0; t < n; ++t) joint[x][t] = q_x[x] * best_ch[x][t];
  rep.witness_coupling = JointPmf(std::move(joint));
  return rep;
}

double bex_grid_binary(double rate, const Pmf& q_x, double tau,
                       const HypothesisPair& pair, int resolution) {
  if (q_x.size() != 2) throw std::invalid_argument("bex_grid_binary: |X| != 2");
  double q0 = q_x[0];
  double lo = std::max(0.0, 2.0 * q0 - 1.0), hi = q0;
  double best = kInf;
  for (int i = 0; i <= resolution; ++i) {
    double c = lo + (hi - lo) * static_cast<double>(i) / resolution;
    std::vector<std::vector<double>> j = {{c, q0 - c}, {q0 - c, 1.0 - 2.0 * q0 + c}};
    // guard tiny negatives from rounding
    for (auto& row : j)
      for (double& v : row) v = std::max(v, 0.0);
    JointPmf coupling(j);
    double h = 0.0;
    Pmf m = coupling.marginal_y();
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t t = 0; t < 2; ++t)
        if (coupling(x, t) > 0.0)
          h -= coupling(x, t) * std::log(coupling(x, t) / m[t]);
    if (h < rate) continue;
    double v = bex_objective(rate, tau, pair, coupling);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace dht
