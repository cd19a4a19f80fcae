#include "dht/arc_forms.hpp"

#include <algorithm>
#include <cmath>

namespace dht {

namespace {

double divergence_term(const JointPmf& q_ux, const JointTriple& t,
                       const Channel& ref) {
  double d = 0.0;
  for (std::size_t u = 0; u < t.nu(); ++u)
    for (std::size_t x = 0; x < t.nx(); ++x) {
      double w = q_ux(u, x);
      if (w <= 0.0) continue;
      for (std::size_t y = 0; y < t.ny(); ++y) {
        double v = t(u, x, y);
        if (v <= 0.0) continue;
        if (ref(x, y) <= 0.0) return kInf;
        d += v * std::log(v / (w * ref(x, y)));
      }
    }
  return std::max(0.0, d);
}

}  // namespace

ArcForms arc_forms(double rho, double rho_c, const JointPmf& q_ux, double lambda,
                   const HypothesisPair& pair, const SolveOptions& opt) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("arc_forms: lambda must be in (0,1]");
  Pmf q_x = q_ux.marginal_y();
  double hx = q_x.entropy();
  if (rho < 0.0 || rho > hx + 1e-12)
    throw std::invalid_argument("arc_forms: rho outside [0, H(Q_X)]");
  double rate = std::max(0.0, hx - rho);
  double tau = lambda_to_tau(lambda);
  RcProblem p(rate, rho_c, q_ux, tau, pair);
  ArcForms f{};
  double bp = solve_brc_prime(p, opt).value;
  double bpp = solve_brc_doubleprime(p, opt).value;
  f.a_rc_prime = lambda * bp;
  f.a_rc_doubleprime = bpp == kInf ? kInf : lambda * bpp;
  f.a_rc = std::min(f.a_rc_prime, f.a_rc_doubleprime);
  f.a_ex = lambda * solve_bex(rate, q_x, tau, pair, opt).value;
  return f;
}

double arc_prime_objective_lambda(double rho, double rho_c, const JointPmf& q_ux,
                                  double lambda, const HypothesisPair& pair,
                                  const JointTriple& q, const JointTriple& qbar) {
  double dq = divergence_term(q_ux, q, pair.p_y_given_x());
  double dqb = divergence_term(q_ux, qbar, pair.pbar_y_given_x());
  if (dq == kInf || dqb == kInf) return kInf;
  InfoMeasures mq = info_measures(q);
  InfoMeasures mqb = info_measures(qbar);
  double max_q =
      std::max(std::max(mq.i_u_y - rho_c, 0.0), mq.i_ux_y - rho);
  double max_qb =
      std::max(std::max(mqb.i_u_y - rho_c, 0.0), mqb.i_ux_y - rho);
  return (1.0 - lambda) * dq + lambda * dqb + lambda * max_q +
         (1.0 - lambda) * max_qb;
}

double arc_doubleprime_objective_lambda(double rho, double rho_c,
                                        const JointPmf& q_ux, double lambda,
                                        const HypothesisPair& pair,
                                        const JointTriple& q,
                                        const JointTriple& qbar) {
  double dq = divergence_term(q_ux, q, pair.p_y_given_x());
  double dqb = divergence_term(q_ux, qbar, pair.pbar_y_given_x());
  if (dq == kInf || dqb == kInf) return kInf;
  InfoMeasures mq = info_measures(q);
  InfoMeasures mqb = info_measures(qbar);
  double hq = std::max(mq.i_x_y_given_u - rho + rho_c, 0.0);
  double hqb = std::max(mqb.i_x_y_given_u - rho + rho_c, 0.0);
  return (1.0 - lambda) * dq + lambda * dqb + lambda * hq +
         (1.0 - lambda) * hqb;
}

}  // namespace dht
