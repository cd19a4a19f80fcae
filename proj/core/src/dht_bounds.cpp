#include "dht/dht_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dht/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace dht {

namespace {
std::atomic<long> g_prime_solves{0}, g_prime_iters{0}, g_pp_solves{0},
    g_pp_iters{0}, g_bex_solves{0};
struct CounterReport {
  ~CounterReport() {
    if (std::getenv("DHT_DEBUG_COUNTERS"))
      std::fprintf(stderr,
                   "[counters] prime: %ld solves %ld iters | dbl: %ld solves %ld iters | bex: %ld\n",
                   g_prime_solves.load(), g_prime_iters.load(), g_pp_solves.load(),
                   g_pp_iters.load(), g_bex_solves.load());
  }
} g_counter_report;
}  // namespace

namespace {

void walk_simplex(std::size_t dim, int res, std::vector<int>& c, std::size_t at,
                  int left, const std::function<void(const std::vector<int>&)>& fn) {
  if (at + 1 == dim) {
    c[at] = left;
    fn(c);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    c[at] = v;
    walk_simplex(dim, res, c, at + 1, left - v, fn);
  }
}

std::vector<Pmf> simplex_mesh(std::size_t dim, int res) {
  std::vector<Pmf> out;
  std::vector<int> c(dim, 0);
  walk_simplex(dim, res, c, 0, res, [&](const std::vector<int>& cc) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i)
      p[i] = static_cast<double>(cc[i]) / static_cast<double>(res);
    out.emplace_back(std::move(p));
  });
  return out;
}

}  // namespace

std::vector<Pmf> qx_grid(const HypothesisPair& pair, const SearchConfig& cfg,
                         double e1_ball) {
  std::vector<Pmf> mesh = simplex_mesh(pair.nx(), cfg.qx_resolution);
  std::vector<Pmf> out;
  for (Pmf& q : mesh) {
    if (cfg.restrict_qx_ball && e1_ball < kInf) {
      double d = kl(q, pair.p_x());
      if (!(d <= e1_ball)) continue;
    }
    out.push_back(std::move(q));
  }
  // P_X itself is always a candidate (it sits in every divergence ball).
  out.push_back(pair.p_x());
  return out;
}

std::vector<Channel> qux_grid(std::size_t nx, std::size_t nu, int resolution,
                              bool symmetric) {
  std::vector<Channel> out;
  std::vector<Pmf> rows = simplex_mesh(nu, resolution);
  if (symmetric && nx == 2 && (nu == 2 || nu == 3)) {
    // Swap-symmetric channels: row1 is row0 with the first two u-symbols
    // exchanged.
    for (const Pmf& r : rows) {
      std::vector<double> other(r.probs());
      std::swap(other[0], other[1]);
      out.emplace_back(std::vector<std::vector<double>>{r.probs(), other});
    }
    return out;
  }
  double combos = std::pow(static_cast<double>(rows.size()), nx);
  if (combos > 2e5) throw SizeGuardError("qux_grid: channel mesh too large");
  std::vector<std::size_t> idx(nx, 0);
  bool done = false;
  while (!done) {
    std::vector<std::vector<double>> ch;
    ch.reserve(nx);
    for (std::size_t x = 0; x < nx; ++x) ch.push_back(rows[idx[x]].probs());
    out.emplace_back(std::move(ch));
    done = true;
    for (std::size_t x = 0; x < nx; ++x) {
      if (++idx[x] < rows.size()) {
        done = false;
        break;
      }
      idx[x] = 0;
    }
  }
  return out;
}

namespace {

std::optional<std::pair<ChannelMatrix, ChannelMatrix>> witness_channels(
    const RcProblem& p, const SolveReport& rep, bool) {
  ChannelMatrix q, qb;
  for (std::size_t u = 0; u < p.q_ux.nx(); ++u)
    for (std::size_t x = 0; x < p.q_ux.ny(); ++x) {
      double w = p.q_ux(u, x);
      if (w <= 0.0) continue;
      std::vector<double> rq(rep.witness_q.ny()), rqb(rep.witness_qbar.ny());
      for (std::size_t y = 0; y < rq.size(); ++y) {
        rq[y] = rep.witness_q(u, x, y) / w;
        rqb[y] = rep.witness_qbar(u, x, y) / w;
      }
      q.push_back(std::move(rq));
      qb.push_back(std::move(rqb));
    }
  return std::make_pair(std::move(q), std::move(qb));
}

JointPmf compose_ux(const Pmf& q_x, const Channel& q_u_given_x) {
  // joint over U x X
  std::size_t nx = q_x.size(), nu = q_u_given_x.outputs();
  std::vector<std::vector<double>> j(nu, std::vector<double>(nx, 0.0));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t u = 0; u < nu; ++u) j[u][x] = q_x[x] * q_u_given_x(x, u);
  return JointPmf(std::move(j));
}

std::vector<double> rb_grid_for(const JointPmf& q_ux, double rate,
                                const SearchConfig& cfg) {
  double i_ux = q_ux.mutual_information();
  double h_u = q_ux.marginal_x().entropy();
  double lower = std::max(i_ux - rate, 0.0);
  std::vector<double> rbs;
  int npts = std::max(cfg.rb_grid_size, 2);
  if (cfg.fixed_rb_grid) {
    for (int i = 0; i < npts; ++i) {
      double rb = h_u * static_cast<double>(i) / static_cast<double>(npts - 1);
      if (rb >= lower) rbs.push_back(rb);
    }
    if (rbs.empty() || rbs.front() > lower + 1e-15) {
      // keep the exact lower endpoint reachable when the mesh misses it
      rbs.insert(rbs.begin(), lower);
    }
  } else {
    for (int i = 0; i < npts; ++i)
      rbs.push_back(lower + (h_u - lower) * static_cast<double>(i) /
                                static_cast<double>(npts - 1));
  }
  return rbs;
}

}  // namespace

BCombinedResult b_combined(double rate, const Pmf& q_x, double tau,
                           const HypothesisPair& pair, const SearchConfig& cfg,
                           double cap, BCombinedCache* cache) {
  BCombinedResult res;
  double hx = q_x.entropy();
  SolveOptions sweep_opt = cfg.solver;
  sweep_opt.multistarts = cfg.sweep_multistarts;
  sweep_opt.seed = cfg.seed;
  sweep_opt.trust_warm_start = cache != nullptr;

  if (!cfg.force_pure_binning && !cfg.skip_expurgated && rate <= hx + 1e-12) {
    g_bex_solves.fetch_add(1, std::memory_order_relaxed);
    res.b_ex = solve_bex(rate, q_x, tau, pair, sweep_opt).value;
    if (res.b_ex > res.value) res.value = res.b_ex;
    if (res.value >= cap) {
      res.capped = true;
      return res;
    }
  }

  std::size_t nu = cfg.u_cardinality > 0 ? cfg.u_cardinality : q_x.size() + 1;
  std::vector<Channel> channels;
  if (cfg.force_pure_binning) {
    // Degenerate U: one symbol.
    channels.emplace_back(std::vector<std::vector<double>>(q_x.size(),
                                                           std::vector<double>{1.0}));
  } else {
    channels = qux_grid(q_x.size(), nu, cfg.qux_resolution, cfg.symmetry_reduction);
  }

  for (std::size_t ci = 0; ci < channels.size(); ++ci) {
    JointPmf q_ux = compose_ux(q_x, channels[ci]);
    std::vector<double> rbs;
    if (cfg.force_pure_binning) {
      if (rate > hx) continue;
      rbs.push_back(hx - rate);
    } else {
      rbs = rb_grid_for(q_ux, rate, cfg);
    }
    std::optional<std::pair<ChannelMatrix, ChannelMatrix>> warm, warm_pp;
    for (std::size_t rj = 0; rj < rbs.size(); ++rj) {
      double rb = rbs[rj];
      RcProblem p(rate, rb, q_ux, tau, pair);
      SolveReport rp;
      if (cache) {
        WarmState& st = cache->prime[{static_cast<int>(ci), static_cast<int>(rj)}];
        rp = solve_brc_prime_warm(p, sweep_opt, st);
      } else {
        rp = solve_brc_prime(p, sweep_opt, warm);
        if (rp.value != kInf) warm = witness_channels(p, rp, false);
      }
      g_prime_solves.fetch_add(1, std::memory_order_relaxed);
      g_prime_iters.fetch_add(rp.total_inner_iters, std::memory_order_relaxed);
      double v = rp.value;
      // B_rc = min(prime, double-prime) <= prime: the double-prime solve can
      // only lower the candidate, so it matters only when prime beats the
      // running maximum.
      if (rp.value > res.value) {
        SolveReport rpp;
        if (cache) {
          WarmState& st = cache->dblprime[{static_cast<int>(ci), static_cast<int>(rj)}];
          rpp = solve_brc_doubleprime_warm(p, sweep_opt, st);
        } else {
          rpp = solve_brc_doubleprime(p, sweep_opt, warm_pp);
          if (rpp.relaxed_i_uy >= 0.0) warm_pp = witness_channels(p, rpp, true);
        }
        g_pp_solves.fetch_add(1, std::memory_order_relaxed);
        g_pp_iters.fetch_add(rpp.total_inner_iters, std::memory_order_relaxed);
        v = std::min(rp.value, rpp.value);
      }
      if (v > res.value) {
        res.value = v;
        res.best_qux = static_cast<int>(ci);
        res.best_rb = rb;
      }
      if (res.value >= cap) {
        res.capped = true;
        return res;
      }
    }
  }
  return res;
}

double theorem2_inner(double rate, const Pmf& q_x, double tau,
                      const HypothesisPair& pair, const SearchConfig& cfg,
                      BCombinedCache* cache) {
  double dterm = chernoff_diag(q_x, tau, pair);
  double cap = dterm == kInf ? kInf : (tau + 1.0) * dterm;
  // B contributes through min{cap, max(B, 0)}, so a nonpositive cap decides
  // the bracket without any search.
  if (cap <= 0.0) return cap;
  BCombinedResult b = b_combined(rate, q_x, tau, pair, cfg, cap, cache);
  if (b.capped) return cap;
  return std::min(cap, std::max(b.value, 0.0));
}

namespace {

// max over the tau grid (with refinement) of  -tau*f1 + theorem2_inner.
// Solver warm starts are shared across the tau evaluations.
std::pair<double, double> f2_core(double rate, const Pmf& q_x, double f1,
                                  const HypothesisPair& pair,
                                  const SearchConfig& cfg) {
  BCombinedCache cache;
  auto objective = [&](double tau) {
    double inner = theorem2_inner(rate, q_x, tau, pair, cfg, &cache);
    if (inner == kInf) return kInf;  // only when both branches blow up
    return -tau * f1 + inner;
  };
  auto [tau_star, best] =
      grid_refine_max(objective, cfg.tau_grid.points(), cfg.tau_grid.refine_iters);
  return {best, tau_star};
}

}  // namespace

double f2_lower(double rho, const Pmf& q_x, double f1,
                const HypothesisPair& pair, const SearchConfig& cfg) {
  double hx = q_x.entropy();
  if (rho < 0.0 || rho >= hx)
    throw std::invalid_argument("f2_lower: rho outside [0, H(Q_X))");
  return f2_core(hx - rho, q_x, f1, pair, cfg).first;
}

E2LowerResult e2_lower(const OperatingPoint& op, const HypothesisPair& pair,
                       const SearchConfig& cfg) {
  std::vector<Pmf> grid = qx_grid(pair, cfg, op.e1);
  std::vector<double> vals(grid.size());
  std::vector<double> taus(grid.size());

  auto point_value = [&](const Pmf& q) {
    double d_pbar = kl(q, pair.pbar_x());
    double d_p = kl(q, pair.p_x());
    if (d_pbar == kInf || d_p == kInf) return std::make_pair(kInf, 0.0);
    auto [core, tau_star] = f2_core(op.rate, q, op.e1 - d_p, pair, cfg);
    return std::make_pair(d_pbar + core, tau_star);
  };

  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    auto [v, t] = point_value(grid[i]);
    vals[i] = v;
    taus[i] = t;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (vals[i] < vals[best]) best = i;

  E2LowerResult out;
  out.value = vals[best];
  out.witness_qx = grid[best];
  out.witness_tau = taus[best];

  if (cfg.refine_qx && pair.nx() == 2 && grid.size() > 1) {
    double q0 = grid[best][0];
    double step = 1.0 / static_cast<double>(cfg.qx_resolution);
    double lo = std::max(0.0, q0 - step), hi = std::min(1.0, q0 + step);
    auto neg = [&](double t) {
      Pmf q(std::vector<double>{t, 1.0 - t});
      return -point_value(q).first;
    };
    auto [t_star, neg_val] = golden_max(neg, lo, hi, 40);
    if (-neg_val < out.value) {
      Pmf q(std::vector<double>{t_star, 1.0 - t_star});
      auto [v, tau_star] = point_value(q);
      out.value = v;
      out.witness_qx = q;
      out.witness_tau = tau_star;
    }
  }
  return out;
}

double e2_converse(const OperatingPoint& op, const HypothesisPair& pair) {
  return d2_primal(pair.p_xy.flatten(), pair.pbar_xy.flatten(), op.e1);
}

SteinLowerResult stein_lower(double rate, const HypothesisPair& pair,
                             const SearchConfig& cfg) {
  SteinLowerResult out;
  const Pmf& px = pair.p_x();
  double d_marg = kl(px, pair.pbar_x());

  auto inner = [&](double tau) { return theorem2_inner(rate, px, tau, pair, cfg); };
  auto [tau_star, sup_inner] =
      grid_refine_max(inner, cfg.tau_grid.points(), cfg.tau_grid.refine_iters);
  (void)tau_star;
  // tau -> inf candidate: the d_tau branch limit is the conditional KL.
  double dlim = conditional_kl(pair.p_y_given_x(), pair.pbar_y_given_x(), px);
  double inner_at_max = inner(cfg.tau_grid.tau_max);
  sup_inner = std::max(sup_inner, std::min(dlim, inner_at_max));
  out.value = d_marg + sup_inner;

  // Weak (random-coding-only) form, Eq-level: the B_rc branch at large tau
  // with a flatness check.
  out.weak_first_term = dlim;  // D(P_XY || P_X x Pbar_{Y|X})
  SearchConfig no_ex = cfg;
  no_ex.force_pure_binning = false;
  no_ex.skip_expurgated = true;
  auto brc_only = [&](double tau) {
    return std::max(0.0, b_combined(rate, px, tau, pair, no_ex, kInf).value);
  };
  double b_hi = brc_only(cfg.tau_grid.tau_max);
  double b_mid = brc_only(0.5 * cfg.tau_grid.tau_max);
  out.tau_flat = std::abs(b_hi - b_mid) <= 1e-3 * (1.0 + std::abs(b_hi));
  out.weak_value = std::min(out.weak_first_term, d_marg + b_hi);
  return out;
}

NoLossResult no_loss_check(double rate, const HypothesisPair& pair,
                           const SearchConfig& cfg) {
  SearchConfig full = cfg;
  full.restrict_qx_ball = false;
  std::vector<Pmf> grid = qx_grid(pair, full, kInf);
  std::vector<double> taus = cfg.tau_grid.points();

  struct Cell {
    double margin;
    std::size_t qi;
    double tau;
  };
  std::vector<Cell> cells(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    double worst = kInf;
    double worst_tau = 0.0;
    for (double tau : taus) {
      double d = chernoff_diag(grid[i], tau, pair);
      if (d == kInf) continue;
      BCombinedResult b = b_combined(rate, grid[i], tau, pair, cfg, d);
      double margin = b.capped ? 0.0 : b.value - d;
      if (margin < worst) {
        worst = margin;
        worst_tau = tau;
      }
    }
    cells[i] = {worst, i, worst_tau};
  });

  NoLossResult out;
  out.worst_margin = kInf;
  for (const Cell& c : cells) {
    if (c.margin < out.worst_margin) {
      out.worst_margin = c.margin;
      out.worst_qx = grid[c.qi];
      out.worst_tau = c.tau;
    }
  }
  out.holds = out.worst_margin >= -1e-9;
  return out;
}

}  // namespace dht
