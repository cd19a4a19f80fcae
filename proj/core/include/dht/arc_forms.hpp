#pragma once

#include "dht/expurgated.hpp"
#include "dht/rc_exponents.hpp"

namespace dht {

/// Lambda-parameterized CD exponents. Computed through the identity
/// A(lambda) = lambda * B(tau) with tau = (1-lambda)/lambda and the rate
/// substitutions rho = H(Q_X) - R, rho_c = R_b.
struct ArcForms {
  double a_rc_prime;
  double a_rc_doubleprime;
  double a_rc;
  double a_ex;
};

ArcForms arc_forms(double rho, double rho_c, const JointPmf& q_ux, double lambda,
                   const HypothesisPair& pair, const SolveOptions& opt = {});

// Direct lambda-form objectives at a witness pair (used to cross-check the
// lambda <-> tau identity).
double arc_prime_objective_lambda(double rho, double rho_c, const JointPmf& q_ux,
                                  double lambda, const HypothesisPair& pair,
                                  const JointTriple& q, const JointTriple& qbar);
double arc_doubleprime_objective_lambda(double rho, double rho_c,
                                        const JointPmf& q_ux, double lambda,
                                        const HypothesisPair& pair,
                                        const JointTriple& q,
                                        const JointTriple& qbar);

}  // namespace dht
