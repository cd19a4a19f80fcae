#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "dht/rc_exponents.hpp"

namespace dht {

using solver_detail::block_residual;
using solver_detail::mirror_step;
using solver_detail::random_simplex;

RcProblem::RcProblem(double rate_, double rb_, JointPmf q_ux_, double tau_,
                     HypothesisPair pair_)
    : rate(rate_), rb(rb_), q_ux(std::move(q_ux_)), tau(tau_), pair(std::move(pair_)) {
  if (rate < 0.0 || rb < 0.0) throw std::invalid_argument("RcProblem: negative rate");
  if (tau < 0.0) throw std::invalid_argument("RcProblem: tau < 0");
  if (q_ux.ny() != pair.nx())
    throw std::invalid_argument("RcProblem: Q_UX / pair alphabet mismatch");
}

namespace {

constexpr double kLogFloor = 1e-300;

inline double safe_log(double v) { return std::log(std::max(v, kLogFloor)); }

// Row-structured view of the two-channel program. Rows with zero Q_UX mass
// are dropped from the variable space.
struct Program {
  std::size_t nrows = 0, ny = 0, nu = 0, nx = 0;
  std::vector<double> w;             // Q_UX mass per kept row
  std::vector<std::size_t> row_u, row_x;
  std::vector<double> w_u;           // Q_U per u
  std::vector<std::vector<double>> logp, logpbar;
  std::vector<std::vector<char>> mask_p, mask_pbar;
  double tau = 0.0, rate = 0.0, rb = 0.0, hx = 0.0;
  bool doubleprime = false;

  std::size_t coupling_dim() const { return doubleprime ? nu * ny : ny; }
};

Program make_program(const RcProblem& p, bool doubleprime) {
  Program pr;
  pr.nu = p.q_ux.nx();
  pr.nx = p.q_ux.ny();
  pr.ny = p.pair.ny();
  pr.tau = p.tau;
  pr.rate = p.rate;
  pr.rb = p.rb;
  pr.doubleprime = doubleprime;
  pr.hx = p.q_ux.marginal_y().entropy();
  pr.w_u.assign(pr.nu, 0.0);
  const Channel& cp = p.pair.p_y_given_x();
  const Channel& cpb = p.pair.pbar_y_given_x();
  for (std::size_t u = 0; u < pr.nu; ++u)
    for (std::size_t x = 0; x < pr.nx; ++x) {
      double w = p.q_ux(u, x);
      pr.w_u[u] += w;
      if (w <= 0.0) continue;
      pr.w.push_back(w);
      pr.row_u.push_back(u);
      pr.row_x.push_back(x);
      std::vector<double> lp(pr.ny), lpb(pr.ny);
      std::vector<char> mp(pr.ny), mpb(pr.ny);
      for (std::size_t y = 0; y < pr.ny; ++y) {
        mp[y] = cp(x, y) > 0.0;
        mpb[y] = cpb(x, y) > 0.0;
        lp[y] = mp[y] ? std::log(cp(x, y)) : -kInf;
        lpb[y] = mpb[y] ? std::log(cpb(x, y)) : -kInf;
      }
      pr.logp.push_back(std::move(lp));
      pr.logpbar.push_back(std::move(lpb));
      pr.mask_p.push_back(std::move(mp));
      pr.mask_pbar.push_back(std::move(mpb));
    }
  pr.nrows = pr.w.size();
  return pr;
}

struct SideState {
  ChannelMatrix ch;
  std::vector<double> m_y;   // output marginal
  std::vector<double> m_uy;  // (u,y) marginal, nu*ny
  double div = 0.0, i_uy = 0.0, i_uxy = 0.0, i_xyu = 0.0;
};

void compute_side(const Program& pr, const std::vector<std::vector<double>>& logref,
                  SideState& s) {
  s.m_y.assign(pr.ny, 0.0);
  s.m_uy.assign(pr.nu * pr.ny, 0.0);
  for (std::size_t r = 0; r < pr.nrows; ++r)
    for (std::size_t y = 0; y < pr.ny; ++y) {
      double v = pr.w[r] * s.ch[r][y];
      s.m_y[y] += v;
      s.m_uy[pr.row_u[r] * pr.ny + y] += v;
    }
  double div = 0.0, i_uxy = 0.0;
  for (std::size_t r = 0; r < pr.nrows; ++r)
    for (std::size_t y = 0; y < pr.ny; ++y) {
      double q = s.ch[r][y];
      if (q <= 0.0) continue;
      double lq = std::log(q);
      if (logref[r][y] == -kInf) {
        div = kInf;
      } else if (div != kInf) {
        div += pr.w[r] * q * (lq - logref[r][y]);
      }
      i_uxy += pr.w[r] * q * (lq - safe_log(s.m_y[y]));
    }
  double i_uy = 0.0;
  for (std::size_t u = 0; u < pr.nu; ++u) {
    if (pr.w_u[u] <= 0.0) continue;
    for (std::size_t y = 0; y < pr.ny; ++y) {
      double v = s.m_uy[u * pr.ny + y];
      if (v > 0.0) i_uy += v * std::log(v / (pr.w_u[u] * s.m_y[y]));
    }
  }
  s.div = div == kInf ? kInf : std::max(0.0, div);
  s.i_uxy = std::max(0.0, i_uxy);
  s.i_uy = std::max(0.0, i_uy);
  s.i_xyu = std::max(0.0, s.i_uxy - s.i_uy);
}

struct MaxArgs {
  double a[3];
  int count;
};

MaxArgs max_args(const Program& pr, const SideState& s) {
  if (pr.doubleprime) return {{s.i_xyu - pr.hx + pr.rate + pr.rb, 0.0, 0.0}, 2};
  return {{s.i_uy - pr.rb, 0.0, s.i_uxy - pr.hx + pr.rate}, 3};
}

double hard_max3(const MaxArgs& m) {
  double v = m.a[0];
  for (int i = 1; i < m.count; ++i) v = std::max(v, m.a[i]);
  return v;
}

// beta * log sum exp(a_i/beta) with softmax weights written to sig.
double smooth_max3(const MaxArgs& m, double beta, double* sig) {
  double mx = hard_max3(m);
  double sum = 0.0;
  for (int i = 0; i < m.count; ++i) {
    sig[i] = std::exp((m.a[i] - mx) / beta);
    sum += sig[i];
  }
  for (int i = 0; i < m.count; ++i) sig[i] /= sum;
  return mx + beta * std::log(sum);
}

void coupling_into(const Program& pr, const SideState& a, const SideState& b,
                   std::vector<double>& c) {
  if (pr.doubleprime) {
    c.resize(pr.nu * pr.ny);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.m_uy[i] - b.m_uy[i];
  } else {
    c.resize(pr.ny);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.m_y[i] - b.m_y[i];
  }
}

double true_objective(const Program& pr, const SideState& q, const SideState& qb) {
  if (q.div == kInf || qb.div == kInf) return kInf;
  return pr.tau * q.div + qb.div + hard_max3(max_args(pr, q)) +
         pr.tau * hard_max3(max_args(pr, qb));
}

struct AlState {
  std::vector<double> mu;
  double pen = 1.0;
  double beta = 1e-1;
};

double smoothed_objective(const Program& pr, const SideState& q,
                          const SideState& qb, const AlState& al, double* sig_q,
                          double* sig_qb, std::vector<double>& c) {
  double base = pr.tau * q.div + qb.div;
  double mq = smooth_max3(max_args(pr, q), al.beta, sig_q);
  double mqb = smooth_max3(max_args(pr, qb), al.beta, sig_qb);
  coupling_into(pr, q, qb, c);
  double alterm = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    alterm += al.mu[i] * c[i] + 0.5 * al.pen * c[i] * c[i];
  return base + mq + pr.tau * mqb + alterm;
}

// Gradient of the smoothed augmented objective w.r.t. one side's channel.
void side_gradient(const Program& pr, const SideState& s, bool barside,
                   const double* sig, const std::vector<double>& t,
                   ChannelMatrix& g) {
  const auto& logref = barside ? pr.logpbar : pr.logp;
  const double div_coef = barside ? 1.0 : pr.tau;
  const double max_coef = barside ? pr.tau : 1.0;
  const double al_sign = barside ? -1.0 : 1.0;
  if (g.size() != pr.nrows) g.assign(pr.nrows, std::vector<double>(pr.ny, 0.0));
  for (std::size_t r = 0; r < pr.nrows; ++r) {
    std::size_t u = pr.row_u[r];
    for (std::size_t y = 0; y < pr.ny; ++y) {
      const auto& mask = barside ? pr.mask_pbar : pr.mask_p;
      if (!mask[r][y]) {
        g[r][y] = 0.0;
        continue;
      }
      double lq = safe_log(s.ch[r][y]);
      double lmy = safe_log(s.m_y[y]);
      double lmuy = safe_log(s.m_uy[u * pr.ny + y]);
      double grad = div_coef * pr.w[r] * (lq - logref[r][y] + 1.0);
      if (pr.doubleprime) {
        grad += max_coef * sig[0] * pr.w[r] * (lq - lmuy);
        grad += al_sign * t[u * pr.ny + y] * pr.w[r];
      } else {
        grad += max_coef * sig[0] * pr.w[r] * (lmuy - lmy);
        grad += max_coef * sig[2] * pr.w[r] * (lq - lmy);
        grad += al_sign * t[y] * pr.w[r];
      }
      g[r][y] = grad;
    }
  }
}

struct InnerResult {
  double smoothed = 0.0;
  double residual = 0.0;
  int iters = 0;
};

InnerResult inner_solve(const Program& pr, SideState& q, SideState& qb,
                        const AlState& al, const SolveOptions& opt) {
  double sig_q[3], sig_qb[3];
  std::vector<double> c, t;
  auto eval = [&](SideState& a, SideState& b, bool grads, ChannelMatrix* gq,
                  ChannelMatrix* gqb) {
    compute_side(pr, pr.logp, a);
    compute_side(pr, pr.logpbar, b);
    double L = smoothed_objective(pr, a, b, al, sig_q, sig_qb, c);
    if (grads) {
      t.resize(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) t[i] = al.mu[i] + al.pen * c[i];
      side_gradient(pr, a, false, sig_q, t, *gq);
      side_gradient(pr, b, true, sig_qb, t, *gqb);
    }
    return L;
  };

  // The objective scales with (1+tau); normalizing the step and the
  // residual keeps convergence behavior uniform across the tau grid.
  const double scale = 1.0 / (1.0 + pr.tau);
  ChannelMatrix gq, gqb, tgq, tgqb;
  double L = eval(q, qb, true, &gq, &gqb);
  double eta = 0.25 * scale;
  InnerResult res;
  int flat = 0, rejects = 0;
  SideState tq, tqb;
  for (int it = 0; it < opt.max_inner_iters; ++it) {
    tq = q;
    tqb = qb;
    for (std::size_t r = 0; r < pr.nrows; ++r) {
      mirror_step(q.ch[r], gq[r], pr.mask_p[r], eta, tq.ch[r]);
      mirror_step(qb.ch[r], gqb[r], pr.mask_pbar[r], eta, tqb.ch[r]);
    }
    double Lt = eval(tq, tqb, true, &tgq, &tgqb);
    if (Lt <= L + 1e-13) {
      double drop = L - Lt;
      L = Lt;
      std::swap(q, tq);
      std::swap(qb, tqb);
      std::swap(gq, tgq);
      std::swap(gqb, tgqb);
      eta = std::min(eta * 1.3, 20.0 * scale);
      rejects = 0;
      double r1 = 0.0;
      for (std::size_t r = 0; r < pr.nrows; ++r) {
        r1 = std::max(r1, block_residual(q.ch[r], gq[r]));
        r1 = std::max(r1, block_residual(qb.ch[r], gqb[r]));
      }
      res.residual = r1 * scale;
      if (res.residual <= opt.inner_tol) break;
      flat = drop <= opt.flat_tol * (1.0 + std::abs(L)) ? flat + 1 : 0;
      if (flat >= 5) break;
    } else {
      eta *= 0.5;
      if (eta < 1e-14 * scale || ++rejects > 60) break;
    }
    res.iters = it + 1;
  }
  res.smoothed = L;
  return res;
}

struct RunResult {
  SideState q, qb;
  double value = kInf;
  double residual = 0.0;
  double viol_tv = 0.0;
  long total_iters = 0;
  int rounds = 0;
};

RunResult run_from(const Program& pr, ChannelMatrix q0, ChannelMatrix qb0,
                   const SolveOptions& opt, const std::vector<double>* mu0 = nullptr,
                   double pen0 = 0.0, std::vector<double>* mu_out = nullptr,
                   double* pen_out = nullptr) {
  SideState q, qb;
  q.ch = std::move(q0);
  qb.ch = std::move(qb0);
  AlState al;
  al.mu.assign(pr.coupling_dim(), 0.0);
  al.pen = 4.0 * (1.0 + pr.tau);
  al.beta = opt.beta_start;
  if (mu0 && mu0->size() == al.mu.size()) {
    al.mu = *mu0;
    if (pen0 > 0.0) al.pen = pen0;
  }
  double prev_v = kInf, prev_res = kInf;
  long out_iters = 0;
  int out_rounds = 0;
  InnerResult ir;
  for (int round = 0; round < opt.max_outer_rounds; ++round) {
    SolveOptions ropt = opt;
    if (al.beta > opt.beta_end)  // annealing rounds need no deep polish
      ropt.max_inner_iters = std::max(60, opt.max_inner_iters / 4);
    ir = inner_solve(pr, q, qb, al, ropt);
    out_iters += ir.iters;
    out_rounds = round + 1;
    compute_side(pr, pr.logp, q);
    compute_side(pr, pr.logpbar, qb);
    std::vector<double> c;
    coupling_into(pr, q, qb, c);
    double vmax = 0.0, vtv = 0.0;
    for (double ci : c) {
      vmax = std::max(vmax, std::abs(ci));
      vtv += std::abs(ci);
    }
    vtv *= 0.5;
    if (al.beta <= opt.beta_end && vtv <= opt.outer_tol &&
        (ir.residual <= opt.inner_tol || ir.residual >= 0.8 * prev_res))
      break;  // converged, or the stationarity floor of the smoothed problem
    prev_res = ir.residual;
    al.beta = std::max(opt.beta_end, al.beta * 0.1);
    for (std::size_t i = 0; i < c.size(); ++i) al.mu[i] += al.pen * c[i];
    if (vmax > 0.25 * prev_v) al.pen = std::min(al.pen * 2.0, 1e12);
    prev_v = vmax;
  }
  RunResult out;
  compute_side(pr, pr.logp, q);
  compute_side(pr, pr.logpbar, qb);
  std::vector<double> c;
  coupling_into(pr, q, qb, c);
  for (double ci : c) out.viol_tv += std::abs(ci);
  out.viol_tv *= 0.5;
  out.value = true_objective(pr, q, qb);
  out.residual = ir.residual;
  out.total_iters = out_iters;
  out.rounds = out_rounds;
  if (mu_out) *mu_out = al.mu;
  if (pen_out) *pen_out = al.pen;
  out.q = std::move(q);
  out.qb = std::move(qb);
  return out;
}

ChannelMatrix deterministic_start(const Program& pr, bool barside) {
  ChannelMatrix ch(pr.nrows, std::vector<double>(pr.ny, 0.0));
  for (std::size_t r = 0; r < pr.nrows; ++r) {
    const auto& mask = barside ? pr.mask_pbar : pr.mask_p;
    const auto& logref = barside ? pr.logpbar : pr.logp;
    double sum = 0.0;
    for (std::size_t y = 0; y < pr.ny; ++y) {
      ch[r][y] = mask[r][y] ? std::exp(logref[r][y]) : 0.0;
      sum += ch[r][y];
    }
    for (std::size_t y = 0; y < pr.ny; ++y) ch[r][y] /= sum;
  }
  return ch;
}

ChannelMatrix random_start(const Program& pr, bool barside, CounterRng& rng) {
  ChannelMatrix ch(pr.nrows);
  for (std::size_t r = 0; r < pr.nrows; ++r) {
    const auto& mask = barside ? pr.mask_pbar : pr.mask_p;
    ch[r] = random_simplex(mask[r], rng);
  }
  return ch;
}

bool lex_less(const RunResult& a, const RunResult& b) {
  for (std::size_t r = 0; r < a.q.ch.size(); ++r)
    for (std::size_t y = 0; y < a.q.ch[r].size(); ++y) {
      if (a.q.ch[r][y] != b.q.ch[r][y]) return a.q.ch[r][y] < b.q.ch[r][y];
    }
  for (std::size_t r = 0; r < a.qb.ch.size(); ++r)
    for (std::size_t y = 0; y < a.qb.ch[r].size(); ++y) {
      if (a.qb.ch[r][y] != b.qb.ch[r][y]) return a.qb.ch[r][y] < b.qb.ch[r][y];
    }
  return false;
}

JointTriple witness_triple(const Program& pr, const SideState& s) {
  JointTriple t(pr.nu, pr.nx, pr.ny);
  for (std::size_t u = 0; u < pr.nu; ++u)
    for (std::size_t x = 0; x < pr.nx; ++x)
      for (std::size_t y = 0; y < pr.ny; ++y) t.at(u, x, y) = 0.0;
  for (std::size_t r = 0; r < pr.nrows; ++r)
    for (std::size_t y = 0; y < pr.ny; ++y)
      t.at(pr.row_u[r], pr.row_x[r], y) = pr.w[r] * s.ch[r][y];
  return t;
}

SolveReport solve_program(
    const Program& pr, const SolveOptions& opt,
    const std::optional<std::pair<ChannelMatrix, ChannelMatrix>>& init) {
  if (pr.nrows == 0) throw std::invalid_argument("solve: empty Q_UX");
  RunResult best;
  bool have = false;
  auto consider = [&](RunResult&& r) {
    if (r.viol_tv > 1e-4) return;  // could not couple; treat as failed start
    if (!have || r.value < best.value - 1e-10 ||
        (std::abs(r.value - best.value) <= 1e-10 && lex_less(r, best))) {
      best = std::move(r);
      have = true;
    }
  };
  if (init) {
    SolveOptions wopt = opt;  // a warm point is near-feasible already
    wopt.beta_start = opt.beta_end;
    wopt.max_outer_rounds = std::max(6, opt.max_outer_rounds / 2);
    RunResult wr = run_from(pr, init->first, init->second, wopt);
    bool settled = wr.viol_tv <= opt.outer_tol && wr.value < kInf;
    consider(std::move(wr));
    if (opt.trust_warm_start && settled) {
      SolveReport rep;
      rep.method = SolveMethod::mirror_descent;
      rep.value = best.value;
      rep.kkt_residual = best.residual;
      rep.constraint_violation = best.viol_tv;
      rep.total_inner_iters = best.total_iters;
      rep.outer_rounds = best.rounds;
      rep.witness_q = witness_triple(pr, best.q);
      rep.witness_qbar = witness_triple(pr, best.qb);
      rep.relaxed_i_uy = best.q.i_uy;
      return rep;
    }
  }
  consider(run_from(pr, deterministic_start(pr, false), deterministic_start(pr, true), opt));
  for (int s = 1; s <= opt.multistarts; ++s) {
    CounterRng rng(opt.seed, static_cast<std::uint64_t>(s));
    consider(run_from(pr, random_start(pr, false, rng), random_start(pr, true, rng), opt));
  }
  SolveReport rep;
  rep.method = SolveMethod::mirror_descent;
  if (!have) {
    rep.value = kInf;
    return rep;
  }
  rep.value = best.value;
  rep.kkt_residual = best.residual;
  rep.constraint_violation = best.viol_tv;
  rep.total_inner_iters = best.total_iters;
  rep.outer_rounds = best.rounds;
  rep.witness_q = witness_triple(pr, best.q);
  rep.witness_qbar = witness_triple(pr, best.qb);
  rep.relaxed_i_uy = best.q.i_uy;
  return rep;
}

SolveReport solve_program_warm(const Program& pr, const SolveOptions& opt,
                               WarmState& state) {
  if (pr.nrows == 0) throw std::invalid_argument("solve: empty Q_UX");
  SolveReport rep;
  rep.method = SolveMethod::mirror_descent;
  auto fill = [&](const RunResult& r) {
    rep.value = r.value;
    rep.kkt_residual = r.residual;
    rep.constraint_violation = r.viol_tv;
    rep.total_inner_iters = r.total_iters;
    rep.outer_rounds = r.rounds;
    rep.witness_q = witness_triple(pr, r.q);
    rep.witness_qbar = witness_triple(pr, r.qb);
    rep.relaxed_i_uy = r.q.i_uy;
  };
  if (state.valid && state.mu.size() == pr.coupling_dim()) {
    SolveOptions wopt = opt;
    wopt.beta_start = opt.beta_end;
    wopt.max_outer_rounds = 3;  // multipliers arrive pre-estimated
    std::vector<double> mu_out;
    double pen_out = 0.0;
    RunResult r = run_from(pr, state.q, state.qb, wopt, &state.mu, state.pen,
                           &mu_out, &pen_out);
    if (r.viol_tv <= opt.outer_tol && r.value < kInf) {
      state.q = r.q.ch;
      state.qb = r.qb.ch;
      state.mu = std::move(mu_out);
      state.pen = pen_out;
      fill(r);
      return rep;
    }
  }
  // cold (or failed warm) path: deterministic start with full schedule
  std::vector<double> mu_out;
  double pen_out = 0.0;
  RunResult r = run_from(pr, deterministic_start(pr, false),
                         deterministic_start(pr, true), opt, nullptr, 0.0,
                         &mu_out, &pen_out);
  if (r.viol_tv > 1e-4) {
    rep.value = kInf;
    state.valid = false;
    return rep;
  }
  state.q = r.q.ch;
  state.qb = r.qb.ch;
  state.mu = std::move(mu_out);
  state.pen = pen_out;
  state.valid = true;
  fill(r);
  return rep;
}

}  // namespace

SolveReport solve_brc_prime_warm(const RcProblem& p, const SolveOptions& opt,
                                 WarmState& state) {
  Program pr = make_program(p, /*doubleprime=*/false);
  return solve_program_warm(pr, opt, state);
}

SolveReport solve_brc_doubleprime_warm(const RcProblem& p, const SolveOptions& opt,
                                       WarmState& state) {
  Program pr = make_program(p, /*doubleprime=*/true);
  SolveReport rep = solve_program_warm(pr, opt, state);
  if (!(rep.relaxed_i_uy > p.rb)) rep.value = kInf;
  return rep;
}

double brc_prime_objective(const RcProblem& p, const JointTriple& q,
                           const JointTriple& qbar) {
  const Channel& cp = p.pair.p_y_given_x();
  const Channel& cpb = p.pair.pbar_y_given_x();
  double hx = p.q_ux.marginal_y().entropy();
  auto div = [&](const JointTriple& t, const Channel& ref) {
    double d = 0.0;
    for (std::size_t u = 0; u < t.nu(); ++u)
      for (std::size_t x = 0; x < t.nx(); ++x) {
        double w = p.q_ux(u, x);
        if (w <= 0.0) continue;
        for (std::size_t y = 0; y < t.ny(); ++y) {
          double v = t(u, x, y);
          if (v <= 0.0) continue;
          if (ref(x, y) <= 0.0) return kInf;
          d += v * std::log(v / (w * ref(x, y)));
        }
      }
    return std::max(0.0, d);
  };
  InfoMeasures mq = info_measures(q);
  InfoMeasures mqb = info_measures(qbar);
  double dq = div(q, cp), dqb = div(qbar, cpb);
  if (dq == kInf || dqb == kInf) return kInf;
  double max_q = std::max({mq.i_u_y - p.rb, 0.0, mq.i_ux_y - hx + p.rate});
  double max_qb = std::max({mqb.i_u_y - p.rb, 0.0, mqb.i_ux_y - hx + p.rate});
  return p.tau * dq + dqb + max_q + p.tau * max_qb;
}

double brc_doubleprime_objective(const RcProblem& p, const JointTriple& q,
                                 const JointTriple& qbar) {
  const Channel& cp = p.pair.p_y_given_x();
  const Channel& cpb = p.pair.pbar_y_given_x();
  double hx = p.q_ux.marginal_y().entropy();
  auto div = [&](const JointTriple& t, const Channel& ref) {
    double d = 0.0;
    for (std::size_t u = 0; u < t.nu(); ++u)
      for (std::size_t x = 0; x < t.nx(); ++x) {
        double w = p.q_ux(u, x);
        if (w <= 0.0) continue;
        for (std::size_t y = 0; y < t.ny(); ++y) {
          double v = t(u, x, y);
          if (v <= 0.0) continue;
          if (ref(x, y) <= 0.0) return kInf;
          d += v * std::log(v / (w * ref(x, y)));
        }
      }
    return std::max(0.0, d);
  };
  InfoMeasures mq = info_measures(q);
  InfoMeasures mqb = info_measures(qbar);
  double dq = div(q, cp), dqb = div(qbar, cpb);
  if (dq == kInf || dqb == kInf) return kInf;
  double hq = std::max(mq.i_x_y_given_u - hx + p.rate + p.rb, 0.0);
  double hqb = std::max(mqb.i_x_y_given_u - hx + p.rate + p.rb, 0.0);
  return p.tau * dq + dqb + hq + p.tau * hqb;
}

SolveReport solve_brc_prime(const RcProblem& p, const SolveOptions& opt,
                            const std::optional<std::pair<ChannelMatrix, ChannelMatrix>>& init) {
  Program pr = make_program(p, /*doubleprime=*/false);
  return solve_program(pr, opt, init);
}

SolveReport solve_brc_prime(const RcProblem& p, const SolveOptions& opt) {
  return solve_brc_prime(p, opt, std::nullopt);
}

SolveReport solve_brc_doubleprime(const RcProblem& p, const SolveOptions& opt,
                                  const std::optional<std::pair<ChannelMatrix, ChannelMatrix>>& init) {
  Program pr = make_program(p, /*doubleprime=*/true);
  SolveReport rep = solve_program(pr, opt, init);
  // Three-step rule, step (ii)/(iii): keep the relaxed value only when the
  // relaxed optimizer satisfies the open constraint.
  if (!(rep.relaxed_i_uy > p.rb)) rep.value = kInf;
  return rep;
}

SolveReport solve_brc_doubleprime(const RcProblem& p, const SolveOptions& opt) {
  return solve_brc_doubleprime(p, opt, std::nullopt);
}

SolveReport solve_brc(const RcProblem& p, const SolveOptions& opt) {
  SolveReport a = solve_brc_prime(p, opt);
  SolveReport b = solve_brc_doubleprime(p, opt);
  if (b.value < a.value - 1e-12) return b;
  return a;  // ties toward the prime branch
}

std::vector<double> solve_brc_prime_sweep(const RcProblem& base,
                                          const std::vector<double>& rb_values,
                                          const SolveOptions& opt) {
  std::vector<SolveReport> wits;
  std::optional<std::pair<ChannelMatrix, ChannelMatrix>> warm;
  for (double rb : rb_values) {
    RcProblem p(base.rate, rb, base.q_ux, base.tau, base.pair);
    SolveReport r = solve_brc_prime(p, opt, warm);
    if (r.value != kInf) {
      ChannelMatrix q, qb;  // rebuild kept-row channels from the witness
      Program pr = make_program(p, false);
      q.assign(pr.nrows, std::vector<double>(pr.ny));
      qb = q;
      for (std::size_t rr = 0; rr < pr.nrows; ++rr)
        for (std::size_t y = 0; y < pr.ny; ++y) {
          q[rr][y] = r.witness_q(pr.row_u[rr], pr.row_x[rr], y) / pr.w[rr];
          qb[rr][y] = r.witness_qbar(pr.row_u[rr], pr.row_x[rr], y) / pr.w[rr];
        }
      warm = std::make_pair(q, qb);
    }
    wits.push_back(std::move(r));
  }
  // Envelope polish over the shared witness pool: for a fixed feasible
  // witness the objective is nonincreasing in R_b, so the pointwise minimum
  // over a common pool is exactly monotone.
  std::vector<double> out(rb_values.size(), kInf);
  for (std::size_t j = 0; j < rb_values.size(); ++j) {
    RcProblem pj(base.rate, rb_values[j], base.q_ux, base.tau, base.pair);
    for (const SolveReport& wr : wits) {
      if (wr.value == kInf) continue;
      out[j] = std::min(out[j], brc_prime_objective(pj, wr.witness_q, wr.witness_qbar));
    }
  }
  return out;
}

std::vector<double> solve_brc_doubleprime_sweep(const RcProblem& base,
                                                const std::vector<double>& rb_values,
                                                const SolveOptions& opt) {
  struct Wit {
    JointTriple q, qb;
    double i_uy;
    bool ok;
  };
  std::vector<Wit> wits;
  std::optional<std::pair<ChannelMatrix, ChannelMatrix>> warm;
  for (double rb : rb_values) {
    RcProblem p(base.rate, rb, base.q_ux, base.tau, base.pair);
    Program pr = make_program(p, true);
    SolveReport r = solve_program(pr, opt, warm);
    Wit w{r.witness_q, r.witness_qbar, r.relaxed_i_uy, r.value != kInf};
    if (w.ok) {
      ChannelMatrix q, qb;
      q.assign(pr.nrows, std::vector<double>(pr.ny));
      qb = q;
      for (std::size_t rr = 0; rr < pr.nrows; ++rr)
        for (std::size_t y = 0; y < pr.ny; ++y) {
          q[rr][y] = r.witness_q(pr.row_u[rr], pr.row_x[rr], y) / pr.w[rr];
          qb[rr][y] = r.witness_qbar(pr.row_u[rr], pr.row_x[rr], y) / pr.w[rr];
        }
      warm = std::make_pair(q, qb);
    }
    wits.push_back(std::move(w));
  }
  std::vector<double> out(rb_values.size(), kInf);
  for (std::size_t j = 0; j < rb_values.size(); ++j) {
    RcProblem pj(base.rate, rb_values[j], base.q_ux, base.tau, base.pair);
    double best = kInf, best_iuy = -1.0;
    for (const Wit& w : wits) {
      if (!w.ok) continue;
      double v = brc_doubleprime_objective(pj, w.q, w.qb);
      if (v < best) {
        best = v;
        best_iuy = w.i_uy;
      }
    }
    out[j] = (best_iuy > rb_values[j]) ? best : kInf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bucketed grid minimization
// ---------------------------------------------------------------------------

namespace {

// All rows of the integer simplex grid restricted to a support mask.
std::vector<std::vector<double>> grid_rows(const std::vector<char>& mask, int res) {
  std::vector<std::size_t> on;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) on.push_back(i);
  std::vector<std::vector<double>> out;
  std::vector<int> c(on.size(), 0);
  auto emit = [&]() {
    std::vector<double> row(mask.size(), 0.0);
    for (std::size_t k = 0; k < on.size(); ++k)
      row[on[k]] = static_cast<double>(c[k]) / static_cast<double>(res);
    out.push_back(std::move(row));
  };
  std::function<void(std::size_t, int)> rec = [&](std::size_t at, int left) {
    if (at + 1 == on.size()) {
      c[at] = left;
      emit();
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[at] = v;
      rec(at + 1, left - v);
    }
  };
  if (!on.empty()) rec(0, res);
  return out;
}

struct GridCombo {
  double f;                    // side objective
  std::vector<double> marg;    // coupling marginal
  double i_uy;                 // first-channel constraint value
  ChannelMatrix ch;
};

// Side objective on one grid channel.
double side_value(const Program& pr, const SideState& s, bool barside) {
  if (s.div == kInf) return kInf;
  double coef_div = barside ? 1.0 : pr.tau;
  double coef_max = barside ? pr.tau : 1.0;
  return coef_div * s.div + coef_max * hard_max3(max_args(pr, s));
}

std::uint64_t bucket_key(const std::vector<double>& marg, double h) {
  std::uint64_t key = 0;
  for (double m : marg) {
    auto k = static_cast<std::uint64_t>(std::llround(m / h)) & 0xFFFFu;
    key = (key << 16) | k;
  }
  return key;
}

// Iterative proportional fitting of the bar channel onto the target coupling
// marginal; returns false when the target is unreachable on the support.
bool ipf_repair(const Program& pr, ChannelMatrix& ch,
                const std::vector<double>& target, int iters) {
  const bool per_u = pr.doubleprime;
  for (int it = 0; it < iters; ++it) {
    // current marginal
    std::vector<double> m(target.size(), 0.0);
    for (std::size_t r = 0; r < pr.nrows; ++r)
      for (std::size_t y = 0; y < pr.ny; ++y) {
        std::size_t idx = per_u ? pr.row_u[r] * pr.ny + y : y;
        m[idx] += pr.w[r] * ch[r][y];
      }
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
      worst = std::max(worst, std::abs(m[i] - target[i]));
    if (worst <= 1e-13) return true;
    for (std::size_t r = 0; r < pr.nrows; ++r) {
      double rs = 0.0;
      for (std::size_t y = 0; y < pr.ny; ++y) {
        std::size_t idx = per_u ? pr.row_u[r] * pr.ny + y : y;
        if (target[idx] <= 0.0) {
          ch[r][y] = 0.0;
        } else if (m[idx] <= 0.0) {
          if (ch[r][y] > 0.0) return false;
        } else {
          ch[r][y] *= target[idx] / m[idx];
        }
        rs += ch[r][y];
      }
      if (rs <= 0.0) return false;
      for (std::size_t y = 0; y < pr.ny; ++y) ch[r][y] /= rs;
    }
  }
  // final violation check
  std::vector<double> m(target.size(), 0.0);
  for (std::size_t r = 0; r < pr.nrows; ++r)
    for (std::size_t y = 0; y < pr.ny; ++y) {
      std::size_t idx = per_u ? pr.row_u[r] * pr.ny + y : y;
      m[idx] += pr.w[r] * ch[r][y];
    }
  for (std::size_t i = 0; i < m.size(); ++i)
    if (std::abs(m[i] - target[i]) > 1e-7) return false;
  return true;
}

double rc_grid_impl(const RcProblem& p, const GridOptions& opt, bool doubleprime,
                    bool constrained) {
  Program pr = make_program(p, doubleprime);
  // enumerate per-row grid rows for both sides
  std::vector<std::vector<std::vector<double>>> rows_q(pr.nrows), rows_qb(pr.nrows);
  double combos_q = 1.0, combos_qb = 1.0;
  for (std::size_t r = 0; r < pr.nrows; ++r) {
    rows_q[r] = grid_rows(pr.mask_p[r], opt.resolution);
    rows_qb[r] = grid_rows(pr.mask_pbar[r], opt.resolution);
    combos_q *= static_cast<double>(rows_q[r].size());
    combos_qb *= static_cast<double>(rows_qb[r].size());
    if (rows_q[r].empty() || rows_qb[r].empty()) return kInf;
  }
  if (combos_q > 3e7 || combos_qb > 3e7)
    throw SizeGuardError("rc grid: too many channel combinations");

  const double h = 1.0 / (static_cast<double>(opt.bucket_scale) * opt.resolution);
  const std::size_t mdim = pr.coupling_dim();

  // Pass 1: bucket the bar side by its coupling marginal.
  struct Entry {
    double g = kInf;
    ChannelMatrix ch;
  };
  std::unordered_map<std::uint64_t, Entry> buckets;
  double min_gbar = kInf;
  {
    SideState s;
    s.ch.assign(pr.nrows, {});
    std::vector<std::size_t> idx(pr.nrows, 0);
    bool done = false;
    while (!done) {
      for (std::size_t r = 0; r < pr.nrows; ++r) s.ch[r] = rows_qb[r][idx[r]];
      compute_side(pr, pr.logpbar, s);
      double g = side_value(pr, s, true);
      if (g < kInf) {
        std::vector<double> marg = doubleprime ? s.m_uy : s.m_y;
        std::uint64_t key = bucket_key(marg, h);
        Entry& e = buckets[key];
        if (g < e.g) {
          e.g = g;
          e.ch = s.ch;
        }
        min_gbar = std::min(min_gbar, g);
      }
      // advance odometer
      done = true;
      for (std::size_t r = 0; r < pr.nrows; ++r) {
        if (++idx[r] < rows_qb[r].size()) {
          done = false;
          break;
        }
        idx[r] = 0;
      }
    }
  }
  if (buckets.empty()) return kInf;

  // Pass 2: walk the first side, pair with nearby buckets, IPF-repair, score.
  double best = kInf;
  ChannelMatrix best_q, best_qb;
  SideState s, sb;
  s.ch.assign(pr.nrows, {});
  std::vector<std::size_t> idx(pr.nrows, 0);
  std::vector<std::uint64_t> neighbor_keys;

  auto score_candidates = [&](const SideState& qs) {
    double f = side_value(pr, qs, false);
    if (f == kInf || f + min_gbar >= best) return;
    const std::vector<double>& marg = doubleprime ? qs.m_uy : qs.m_y;
    neighbor_keys.clear();
    std::vector<int> base(mdim);
    for (std::size_t i = 0; i < mdim; ++i)
      base[i] = static_cast<int>(std::llround(marg[i] / h));
    std::size_t total = 1;
    for (std::size_t i = 0; i < mdim; ++i) total *= 3;
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t tt = t;
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < mdim; ++i) {
        int off = static_cast<int>(tt % 3) - 1;
        tt /= 3;
        auto k = static_cast<std::uint64_t>(base[i] + off) & 0xFFFFu;
        key = (key << 16) | k;
      }
      neighbor_keys.push_back(key);
    }
    for (std::uint64_t key : neighbor_keys) {
      auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      if (f + it->second.g >= best) continue;
      ChannelMatrix repaired = it->second.ch;
      if (!ipf_repair(pr, repaired, marg, opt.ipf_iters)) continue;
      sb.ch = std::move(repaired);
      compute_side(pr, pr.logpbar, sb);
      double total_val = pr.tau * qs.div + sb.div + hard_max3(max_args(pr, qs)) +
                         pr.tau * hard_max3(max_args(pr, sb));
      if (total_val < best) {
        best = total_val;
        best_q = qs.ch;
        best_qb = sb.ch;
      }
    }
  };

  bool done = false;
  while (!done) {
    for (std::size_t r = 0; r < pr.nrows; ++r) s.ch[r] = rows_q[r][idx[r]];
    compute_side(pr, pr.logp, s);
    if (!constrained || s.i_uy > p.rb) score_candidates(s);
    done = true;
    for (std::size_t r = 0; r < pr.nrows; ++r) {
      if (++idx[r] < rows_q[r].size()) {
        done = false;
        break;
      }
      idx[r] = 0;
    }
  }

  // Local refinement around the coarse argmin: re-mesh each first-side row
  // one coarse cell wide at `local_refine` times the density, keep the
  // IPF-repaired partner as the coupling base.
  if (best < kInf && opt.local_refine > 1) {
    const int fine = opt.resolution * opt.local_refine;
    std::vector<std::vector<std::vector<double>>> fine_rows(pr.nrows);
    for (std::size_t r = 0; r < pr.nrows; ++r) {
      // integer window around the coarse row on the fine lattice
      std::vector<std::vector<double>> cands;
      std::vector<char> mask = pr.mask_p[r];
      std::vector<std::size_t> on;
      for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) on.push_back(i);
      std::vector<int> center(on.size());
      for (std::size_t k = 0; k < on.size(); ++k)
        center[k] = static_cast<int>(std::llround(best_q[r][on[k]] * fine));
      std::function<void(std::size_t, int, std::vector<int>&)> rec =
          [&](std::size_t at, int left, std::vector<int>& acc) {
            if (at + 1 == on.size()) {
              acc[at] = left;
              if (std::abs(left - center[at]) <= opt.local_refine) {
                std::vector<double> row(mask.size(), 0.0);
                for (std::size_t k = 0; k < on.size(); ++k)
                  row[on[k]] = static_cast<double>(acc[k]) / fine;
                cands.push_back(std::move(row));
              }
              return;
            }
            int lo = std::max(0, center[at] - opt.local_refine);
            int hi = std::min(left, center[at] + opt.local_refine);
            for (int v = lo; v <= hi; ++v) {
              acc[at] = v;
              rec(at + 1, left - v, acc);
            }
          };
      std::vector<int> acc(on.size());
      if (!on.empty()) rec(0, fine, acc);
      if (cands.empty()) cands.push_back(best_q[r]);
      fine_rows[r] = std::move(cands);
    }
    ChannelMatrix repair_base = best_qb;
    std::vector<std::size_t> fi(pr.nrows, 0);
    bool fdone = false;
    while (!fdone) {
      for (std::size_t r = 0; r < pr.nrows; ++r) s.ch[r] = fine_rows[r][fi[r]];
      compute_side(pr, pr.logp, s);
      if (!constrained || s.i_uy > p.rb) {
        double f = side_value(pr, s, false);
        if (f < kInf && f < best) {
          const std::vector<double>& marg = doubleprime ? s.m_uy : s.m_y;
          ChannelMatrix repaired = repair_base;
          if (ipf_repair(pr, repaired, marg, opt.ipf_iters)) {
            sb.ch = std::move(repaired);
            compute_side(pr, pr.logpbar, sb);
            double total_val = pr.tau * s.div + sb.div +
                               hard_max3(max_args(pr, s)) +
                               pr.tau * hard_max3(max_args(pr, sb));
            best = std::min(best, total_val);
          }
        }
      }
      fdone = true;
      for (std::size_t r = 0; r < pr.nrows; ++r) {
        if (++fi[r] < fine_rows[r].size()) {
          fdone = false;
          break;
        }
        fi[r] = 0;
      }
    }
  }
  return best;
}

}  // namespace

double brc_prime_grid(const RcProblem& p, const GridOptions& opt) {
  return rc_grid_impl(p, opt, /*doubleprime=*/false, /*constrained=*/false);
}

double brc_doubleprime_grid_constrained(const RcProblem& p, const GridOptions& opt) {
  return rc_grid_impl(p, opt, /*doubleprime=*/true, /*constrained=*/true);
}

}  // namespace dht
