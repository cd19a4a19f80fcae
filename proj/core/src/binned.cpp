#include "dht/binned.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace dht {

using solver_detail::block_residual;
using solver_detail::mirror_step;
using solver_detail::random_simplex;
using solver_detail::smooth_max;

namespace {
constexpr double kTiny = 1e-300;
inline double slog(double v) { return std::log(std::max(v, kTiny)); }
}  // namespace

double binned_brc(double rate, const Pmf& q_x, double tau,
                  const HypothesisPair& pair, const SolveOptions& opt) {
  const std::size_t nx = q_x.size(), ny = pair.ny();
  const Channel& cp = pair.p_y_given_x();
  const Channel& cpb = pair.pbar_y_given_x();

  std::vector<std::vector<char>> mask_p(nx, std::vector<char>(ny)),
      mask_pb(nx, std::vector<char>(ny));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      mask_p[x][y] = cp(x, y) > 0.0;
      mask_pb[x][y] = cpb(x, y) > 0.0;
    }

  struct Side {
    ChannelMatrix ch;
    std::vector<double> m_y;
    double div = 0.0;
    double h_x_given_y = 0.0;
  };
  auto compute = [&](Side& s, const Channel& ref) {
    s.m_y.assign(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) s.m_y[y] += q_x[x] * s.ch[x][y];
    double div = 0.0;
    double h_joint = 0.0;  // H(X,Y) of the induced joint
    for (std::size_t x = 0; x < nx; ++x) {
      if (q_x[x] <= 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        double v = q_x[x] * s.ch[x][y];
        if (v <= 0.0) continue;
        if (ref(x, y) <= 0.0) {
          div = kInf;
        } else if (div != kInf) {
          div += v * std::log(s.ch[x][y] / ref(x, y));
        }
        h_joint -= v * std::log(v);
      }
    }
    double h_y = 0.0;
    for (double m : s.m_y) h_y -= xlogx(m);
    s.div = div == kInf ? kInf : std::max(0.0, div);
    s.h_x_given_y = std::max(0.0, h_joint - h_y);
  };

  // Augmented Lagrangian on the shared output marginal; smoothed hinge.
  auto solve_from = [&](ChannelMatrix ch0, ChannelMatrix chb0) {
    Side q, qb;
    q.ch = std::move(ch0);
    qb.ch = std::move(chb0);
    std::vector<double> mu(ny, 0.0);
    double pen = 4.0 * (1.0 + tau), beta = opt.beta_start, prev_v = kInf;
    double residual = 0.0;
    std::vector<double> sig_q, sig_qb;

    auto eval = [&](Side& a, Side& b, bool grads, ChannelMatrix* gq,
                    ChannelMatrix* gqb) {
      compute(a, cp);
      compute(b, cpb);
      double mq = smooth_max({rate - a.h_x_given_y, 0.0}, beta, &sig_q);
      double mqb = smooth_max({rate - b.h_x_given_y, 0.0}, beta, &sig_qb);
      double L = tau * a.div + b.div + mq + tau * mqb;
      for (std::size_t y = 0; y < ny; ++y) {
        double c = a.m_y[y] - b.m_y[y];
        L += mu[y] * c + 0.5 * pen * c * c;
      }
      if (grads) {
        gq->assign(nx, std::vector<double>(ny, 0.0));
        gqb->assign(nx, std::vector<double>(ny, 0.0));
        for (std::size_t x = 0; x < nx; ++x) {
          if (q_x[x] <= 0.0) continue;
          for (std::size_t y = 0; y < ny; ++y) {
            double t = mu[y] + pen * (a.m_y[y] - b.m_y[y]);
            if (mask_p[x][y]) {
              // d(-H(X|Y))/d ch = q_x * log( j / m_y ), j = q_x*ch
              double dh = slog(q_x[x] * a.ch[x][y]) - slog(a.m_y[y]);
              (*gq)[x][y] = q_x[x] * (tau * (slog(a.ch[x][y]) - slog(cp(x, y)) + 1.0) +
                                      sig_q[0] * dh + t);
            }
            if (mask_pb[x][y]) {
              double dh = slog(q_x[x] * qb.ch[x][y]) - slog(b.m_y[y]);
              (*gqb)[x][y] = q_x[x] * ((slog(b.ch[x][y]) - slog(cpb(x, y)) + 1.0) +
                                       tau * sig_qb[0] * dh - t);
            }
          }
        }
      }
      return L;
    };

    const double scale = 1.0 / (1.0 + tau);
    for (int round = 0; round < opt.max_outer_rounds; ++round) {
      ChannelMatrix gq, gqb;
      double L = eval(q, qb, true, &gq, &gqb);
      double eta = 0.25 * scale;
      int flat = 0, rejects = 0;
      for (int it = 0; it < opt.max_inner_iters; ++it) {
        Side tq = q, tqb = qb;
        for (std::size_t x = 0; x < nx; ++x) {
          mirror_step(q.ch[x], gq[x], mask_p[x], eta, tq.ch[x]);
          mirror_step(qb.ch[x], gqb[x], mask_pb[x], eta, tqb.ch[x]);
        }
        double Lt = eval(tq, tqb, false, nullptr, nullptr);
        if (Lt <= L + 1e-13) {
          double drop = L - Lt;
          q = std::move(tq);
          qb = std::move(tqb);
          L = eval(q, qb, true, &gq, &gqb);
          eta = std::min(eta * 1.3, 20.0 * scale);
          rejects = 0;
          residual = 0.0;
          for (std::size_t x = 0; x < nx; ++x) {
            if (q_x[x] <= 0.0) continue;
            residual = std::max(residual, block_residual(q.ch[x], gq[x]));
            residual = std::max(residual, block_residual(qb.ch[x], gqb[x]));
          }
          residual *= scale;
          if (residual <= opt.inner_tol) break;
          flat = drop <= 1e-14 * (1.0 + std::abs(L)) ? flat + 1 : 0;
          if (flat >= 4) break;
        } else {
          eta *= 0.5;
          if (eta < 1e-14 * scale || ++rejects > 60) break;
        }
      }
      compute(q, cp);
      compute(qb, cpb);
      double vmax = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        vmax = std::max(vmax, std::abs(q.m_y[y] - qb.m_y[y]));
      if (beta <= opt.beta_end && vmax <= opt.outer_tol && residual <= opt.inner_tol)
        break;
      beta = std::max(opt.beta_end, beta * 0.1);
      for (std::size_t y = 0; y < ny; ++y) mu[y] += pen * (q.m_y[y] - qb.m_y[y]);
      if (vmax > 0.25 * prev_v) pen = std::min(pen * 2.0, 1e12);
      prev_v = vmax;
    }
    compute(q, cp);
    compute(qb, cpb);
    double viol = 0.0;
    for (std::size_t y = 0; y < ny; ++y)
      viol += std::abs(q.m_y[y] - qb.m_y[y]);
    if (0.5 * viol > 1e-4 || q.div == kInf || qb.div == kInf) return kInf;
    return tau * q.div + qb.div + std::max(rate - q.h_x_given_y, 0.0) +
           tau * std::max(rate - qb.h_x_given_y, 0.0);
  };

  auto start = [&](const Channel& ref, const std::vector<std::vector<char>>& mask) {
    ChannelMatrix ch(nx, std::vector<double>(ny, 0.0));
    for (std::size_t x = 0; x < nx; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        ch[x][y] = mask[x][y] ? ref(x, y) : 0.0;
        s += ch[x][y];
      }
      for (std::size_t y = 0; y < ny; ++y) ch[x][y] /= s;
    }
    return ch;
  };

  double best = solve_from(start(cp, mask_p), start(cpb, mask_pb));
  for (int s = 1; s <= opt.multistarts; ++s) {
    CounterRng rng(opt.seed, 0xb1ull + static_cast<std::uint64_t>(s));
    ChannelMatrix a(nx), b(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      a[x] = random_simplex(mask_p[x], rng);
      b[x] = random_simplex(mask_pb[x], rng);
    }
    best = std::min(best, solve_from(std::move(a), std::move(b)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Zero-rate program on coupled joint laws
// ---------------------------------------------------------------------------

double zero_rate_bound(double e1, const HypothesisPair& pair,
                       const SolveOptions& opt) {
  if (e1 < 0.0) throw std::invalid_argument("zero_rate_bound: E1 < 0");
  const std::size_t nx = pair.nx(), ny = pair.ny(), n = nx * ny;
  std::vector<char> mask_q(n), mask_qb(n);
  std::vector<double> logp(n), logpb(n);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::size_t i = x * ny + y;
      mask_q[i] = pair.p_xy(x, y) > 0.0;
      mask_qb[i] = pair.pbar_xy(x, y) > 0.0;
      logp[i] = mask_q[i] ? std::log(pair.p_xy(x, y)) : -kInf;
      logpb[i] = mask_qb[i] ? std::log(pair.pbar_xy(x, y)) : -kInf;
    }

  const std::size_t cdim = nx + ny;
  auto marginals = [&](const std::vector<double>& j, std::vector<double>& m) {
    m.assign(cdim, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        m[x] += j[x * ny + y];
        m[nx + y] += j[x * ny + y];
      }
  };
  auto divergence = [&](const std::vector<double>& j, const std::vector<double>& lref) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j[i] <= 0.0) continue;
      if (lref[i] == -kInf) return kInf;
      d += j[i] * (std::log(j[i]) - lref[i]);
    }
    return std::max(0.0, d);
  };

  auto solve_from = [&](std::vector<double> q, std::vector<double> qb) {
    std::vector<double> mu(cdim, 0.0);
    double mu_h = 0.0, pen = 8.0, prev_v = kInf, residual = 0.0;
    std::vector<double> mq(cdim), mqb(cdim);

    auto eval = [&](const std::vector<double>& a, const std::vector<double>& b,
                    bool grads, std::vector<double>* ga, std::vector<double>* gb) {
      marginals(a, mq);
      marginals(b, mqb);
      double da = divergence(a, logp);
      double db = divergence(b, logpb);
      double psi = da - e1;
      double hinge = std::max(0.0, psi + mu_h / pen);
      double L = db + 0.5 * pen * hinge * hinge - 0.5 * mu_h * mu_h / pen;
      for (std::size_t i = 0; i < cdim; ++i) {
        double c = mq[i] - mqb[i];
        L += mu[i] * c + 0.5 * pen * c * c;
      }
      if (grads) {
        ga->assign(n, 0.0);
        gb->assign(n, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
          for (std::size_t y = 0; y < ny; ++y) {
            std::size_t i = x * ny + y;
            double tx = mu[x] + pen * (mq[x] - mqb[x]);
            double ty = mu[nx + y] + pen * (mq[nx + y] - mqb[nx + y]);
            if (mask_q[i])
              (*ga)[i] = pen * hinge * (slog(a[i]) - logp[i] + 1.0) + tx + ty;
            if (mask_qb[i])
              (*gb)[i] = (slog(b[i]) - logpb[i] + 1.0) - tx - ty;
          }
      }
      return L;
    };

    std::vector<double> gq, gqb;
    for (int round = 0; round < opt.max_outer_rounds; ++round) {
      double L = eval(q, qb, true, &gq, &gqb);
      double eta = 0.25;
      int flat = 0, rejects = 0;
      for (int it = 0; it < opt.max_inner_iters; ++it) {
        std::vector<double> tq, tqb;
        mirror_step(q, gq, mask_q, eta, tq);
        mirror_step(qb, gqb, mask_qb, eta, tqb);
        double Lt = eval(tq, tqb, false, nullptr, nullptr);
        if (Lt <= L + 1e-13) {
          double drop = L - Lt;
          q = std::move(tq);
          qb = std::move(tqb);
          L = eval(q, qb, true, &gq, &gqb);
          eta = std::min(eta * 1.3, 20.0);
          rejects = 0;
          residual = std::max(block_residual(q, gq), block_residual(qb, gqb));
          if (residual <= opt.inner_tol) break;
          flat = drop <= 1e-14 * (1.0 + std::abs(L)) ? flat + 1 : 0;
          if (flat >= 4) break;
        } else {
          eta *= 0.5;
          if (eta < 1e-14 || ++rejects > 60) break;
        }
      }
      marginals(q, mq);
      marginals(qb, mqb);
      double vmax = std::max(0.0, divergence(q, logp) - e1);
      for (std::size_t i = 0; i < cdim; ++i)
        vmax = std::max(vmax, std::abs(mq[i] - mqb[i]));
      if (vmax <= opt.outer_tol && residual <= opt.inner_tol) break;
      for (std::size_t i = 0; i < cdim; ++i) mu[i] += pen * (mq[i] - mqb[i]);
      mu_h = std::max(0.0, mu_h + pen * (divergence(q, logp) - e1));
      if (vmax > 0.25 * prev_v) pen = std::min(pen * 2.0, 1e12);
      prev_v = vmax;
    }
    marginals(q, mq);
    marginals(qb, mqb);
    double viol = std::max(0.0, divergence(q, logp) - e1);
    for (std::size_t i = 0; i < cdim; ++i)
      viol = std::max(viol, std::abs(mq[i] - mqb[i]));
    if (viol > 1e-4) return kInf;
    return divergence(qb, logpb);
  };

  std::vector<double> q0(pair.p_xy.flat());
  // Start Qbar at Pbar, projected to P's marginals by a few IPF rounds.
  std::vector<double> qb0(pair.pbar_xy.flat());
  double best = solve_from(q0, qb0);
  for (int s = 1; s <= opt.multistarts; ++s) {
    CounterRng rng(opt.seed, 0x02ull + static_cast<std::uint64_t>(s));
    best = std::min(best, solve_from(random_simplex(mask_q, rng),
                                     random_simplex(mask_qb, rng)));
  }
  return best;
}

double zero_rate_bound_grid(double e1, const HypothesisPair& pair,
                            int resolution) {
  const std::size_t nx = pair.nx(), ny = pair.ny(), n = nx * ny;
  if (n > 6) throw SizeGuardError("zero_rate_bound_grid: alphabet too large");
  std::vector<double> logp(n), logpb(n);
  for (std::size_t i = 0; i < n; ++i) {
    logp[i] = pair.p_xy.flat()[i] > 0.0 ? std::log(pair.p_xy.flat()[i]) : -kInf;
    logpb[i] = pair.pbar_xy.flat()[i] > 0.0 ? std::log(pair.pbar_xy.flat()[i]) : -kInf;
  }
  auto divergence = [&](const std::vector<double>& j, const std::vector<double>& lref) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j[i] <= 0.0) continue;
      if (lref[i] == -kInf) return kInf;
      d += j[i] * (std::log(j[i]) - lref[i]);
    }
    return std::max(0.0, d);
  };
  auto key_of = [&](const std::vector<double>& j) {
    // quantized (X,Y) marginals
    std::uint64_t key = 0;
    for (std::size_t x = 0; x < nx; ++x) {
      double m = 0.0;
      for (std::size_t y = 0; y < ny; ++y) m += j[x * ny + y];
      key = (key << 16) | (static_cast<std::uint64_t>(
                               std::llround(m * 2.0 * resolution)) &
                           0xFFFFu);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      double m = 0.0;
      for (std::size_t x = 0; x < nx; ++x) m += j[x * ny + y];
      key = (key << 16) |
            (static_cast<std::uint64_t>(std::llround(m * 2.0 * resolution)) &
             0xFFFFu);
    }
    return key;
  };

  // Pass 1: bucket Qbar candidates by quantized marginals.
  struct Entry {
    double val = kInf;
    std::vector<double> j;
  };
  std::unordered_map<std::uint64_t, Entry> buckets;
  std::vector<int> c(n, 0);
  std::function<void(std::size_t, int, const std::function<void(const std::vector<int>&)>&)>
      rec = [&](std::size_t at, int left,
                const std::function<void(const std::vector<int>&)>& fn) {
        if (at + 1 == n) {
          c[at] = left;
          fn(c);
          return;
        }
        for (int v = 0; v <= left; ++v) {
          c[at] = v;
          rec(at + 1, left - v, fn);
        }
      };
  rec(0, resolution, [&](const std::vector<int>& cc) {
    std::vector<double> j(n);
    for (std::size_t i = 0; i < n; ++i)
      j[i] = static_cast<double>(cc[i]) / resolution;
    double v = divergence(j, logpb);
    if (v == kInf) return;
    Entry& e = buckets[key_of(j)];
    if (v < e.val) {
      e.val = v;
      e.j = std::move(j);
    }
  });

  // Pass 2: feasible Q candidates; match buckets, Sinkhorn-repair, score.
  double best = kInf;
  rec(0, resolution, [&](const std::vector<int>& cc) {
    std::vector<double> j(n);
    for (std::size_t i = 0; i < n; ++i)
      j[i] = static_cast<double>(cc[i]) / resolution;
    if (divergence(j, logp) > e1) return;
    std::vector<double> mx(nx, 0.0), my(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        mx[x] += j[x * ny + y];
        my[y] += j[x * ny + y];
      }
    // neighbor buckets
    std::vector<int> base(nx + ny);
    for (std::size_t x = 0; x < nx; ++x)
      base[x] = static_cast<int>(std::llround(mx[x] * 2.0 * resolution));
    for (std::size_t y = 0; y < ny; ++y)
      base[nx + y] = static_cast<int>(std::llround(my[y] * 2.0 * resolution));
    std::size_t total = 1;
    for (std::size_t i = 0; i < nx + ny; ++i) total *= 3;
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t tt = t;
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < nx + ny; ++i) {
        int off = static_cast<int>(tt % 3) - 1;
        tt /= 3;
        key = (key << 16) | (static_cast<std::uint64_t>(base[i] + off) & 0xFFFFu);
      }
      auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      if (it->second.val >= best) continue;
      // Sinkhorn repair of the candidate onto (mx, my)
      std::vector<double> r = it->second.j;
      bool ok = true;
      for (int rounds = 0; rounds < 300 && ok; ++rounds) {
        double worst = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
          double s = 0.0;
          for (std::size_t y = 0; y < ny; ++y) s += r[x * ny + y];
          worst = std::max(worst, std::abs(s - mx[x]));
          if (s <= 0.0 && mx[x] > 0.0) {
            ok = false;
            break;
          }
          if (s > 0.0)
            for (std::size_t y = 0; y < ny; ++y) r[x * ny + y] *= mx[x] / s;
        }
        for (std::size_t y = 0; y < ny && ok; ++y) {
          double s = 0.0;
          for (std::size_t x = 0; x < nx; ++x) s += r[x * ny + y];
          worst = std::max(worst, std::abs(s - my[y]));
          if (s <= 0.0 && my[y] > 0.0) {
            ok = false;
            break;
          }
          if (s > 0.0)
            for (std::size_t x = 0; x < nx; ++x) r[x * ny + y] *= my[y] / s;
        }
        if (worst <= 1e-13) break;
      }
      if (!ok) continue;
      double v = divergence(r, logpb);
      best = std::min(best, v);
    }
  });
  return best;
}

}  // namespace dht
