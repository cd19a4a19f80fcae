#pragma once

#include <map>

#include "dht/cd_code.hpp"
#include "dht/joint.hpp"
#include "dht/rng.hpp"
#include "dht/type_class.hpp"

namespace dht {

/// A fixed-composition hierarchical ensemble: e^{n rho_c} cloud centers
/// uniform on T_n(Q_U), then e^{n rho_s} satellites per cloud uniform on the
/// conditional class T_n(Q_{X|U}, u^n).
struct EnsembleSpec {
  int n = 0;
  std::size_t nu = 0, nx = 0;
  TypeDescriptor q_ux;  // joint type over U x X, index u*nx + x
  double rho_c = 0.0, rho_s = 0.0;
  std::uint64_t seed = 0;

  EnsembleSpec(int n_, std::size_t nu_, std::size_t nx_, TypeDescriptor q_ux_,
               double rho_c_, double rho_s_, std::uint64_t seed_);

  // Rounded draw counts (half up, minimum 1); these define the effective
  // rates used in every comparison.
  long long num_clouds() const;
  long long num_satellites() const;
  double rho_c_effective() const;
  double rho_s_effective() const;
  double rho_effective() const;

  std::vector<int> u_counts() const;                   // n * Q_U
  std::vector<int> x_counts_given_u(std::size_t u) const;  // n * Q_{UX}(u,.)
};

struct HierarchicalDraw {
  std::vector<std::vector<int>> centers;                   // [cloud] over U
  std::vector<std::vector<std::vector<int>>> satellites;   // [cloud][sat] over X

  // Distinct codewords (first occurrence keeps its cloud); a valid CdCode.
  CdCode dedup(std::size_t nx, std::size_t nu) const;
  long long multiplicity_total() const;
};

// Draw number `draw_index` of the ensemble; bit-reproducible for a given
// (spec.seed, draw_index) under any parallel schedule.
HierarchicalDraw draw_hierarchical(const EnsembleSpec& spec,
                                   std::uint64_t draw_index);

/// Exact type-class enumerator tallies of one draw against a fixed y^n:
/// M counts (cloud, satellite, y) joint types with multiplicity, N counts
/// (cloud, y) joint types.
struct EnumeratorTally {
  std::map<std::vector<int>, long long> m_counts;  // key: counts over U*X*Y
  std::map<std::vector<int>, long long> n_counts;  // key: counts over U*Y
  long long m_total = 0;
  long long n_total = 0;
};

EnumeratorTally enumerate_tally(const HierarchicalDraw& draw,
                                const std::vector<int>& y, std::size_t nu,
                                std::size_t nx, std::size_t ny);

// Exact expectation of the cloud-center enumerator N_y(Q_UY):
// num_clouds * |T_n(Q_{U|Y}, y^n)| / |T_n(Q_U)|; zero when the type is
// incompatible with y^n or Q_U.
double enumerator_expectation_n(const EnsembleSpec& spec,
                                const TypeDescriptor& q_uy,
                                const std::vector<int>& y, std::size_t ny);

// Exact expectation of the codeword enumerator M_y(Q_UXY).
double enumerator_expectation_m(const EnsembleSpec& spec,
                                const TypeDescriptor& q_uxy,
                                const std::vector<int>& y, std::size_t ny);

/// The three-case asymptotic exponent of
/// (1/n) log E[ M^{1-lambda}(Q) M^lambda(Qbar) ] for the hierarchical
/// ensemble; requires Q_UX = Qbar_UX and Q_Y = Qbar_Y.
double correlation_exponent_formula(const JointTriple& q, const JointTriple& qbar,
                                    double lambda, double rho, double rho_c);

// The Delta_lambda functional of the same limit.
double delta_lambda(const JointTriple& q, const JointTriple& qbar, double lambda,
                    double rho, double rho_c);

}  // namespace dht
