#include "dht/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dht {

EnsembleSpec::EnsembleSpec(int n_, std::size_t nu_, std::size_t nx_,
                           TypeDescriptor q_ux_, double rho_c_, double rho_s_,
                           std::uint64_t seed_)
    : n(n_), nu(nu_), nx(nx_), q_ux(std::move(q_ux_)), rho_c(rho_c_),
      rho_s(rho_s_), seed(seed_) {
  if (q_ux.alphabet() != nu * nx)
    throw std::invalid_argument("EnsembleSpec: joint type / alphabet mismatch");
  if (q_ux.n != n) throw std::invalid_argument("EnsembleSpec: type blocklength mismatch");
  if (rho_c < 0.0 || rho_s < 0.0)
    throw std::invalid_argument("EnsembleSpec: negative rate");
}

long long EnsembleSpec::num_clouds() const {
  return std::max(1ll, std::llround(std::exp(n * rho_c)));
}

long long EnsembleSpec::num_satellites() const {
  return std::max(1ll, std::llround(std::exp(n * rho_s)));
}

double EnsembleSpec::rho_c_effective() const {
  return std::log(static_cast<double>(num_clouds())) / n;
}

double EnsembleSpec::rho_s_effective() const {
  return std::log(static_cast<double>(num_satellites())) / n;
}

double EnsembleSpec::rho_effective() const {
  return rho_c_effective() + rho_s_effective();
}

std::vector<int> EnsembleSpec::u_counts() const {
  std::vector<int> c(nu, 0);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t x = 0; x < nx; ++x) c[u] += q_ux.counts[u * nx + x];
  return c;
}

std::vector<int> EnsembleSpec::x_counts_given_u(std::size_t u) const {
  std::vector<int> c(nx, 0);
  for (std::size_t x = 0; x < nx; ++x) c[x] = q_ux.counts[u * nx + x];
  return c;
}

CdCode HierarchicalDraw::dedup(std::size_t nx, std::size_t nu) const {
  CdCode code;
  code.n = centers.empty() ? 0 : static_cast<int>(centers[0].size());
  std::set<std::vector<int>> seen;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (const auto& sat : satellites[c]) {
      if (seen.insert(sat).second) {
        code.codewords.push_back(sat);
        code.clouds.push_back(centers[c]);
      }
    }
  code.validate(nx, nu);
  return code;
}

long long HierarchicalDraw::multiplicity_total() const {
  long long t = 0;
  for (const auto& sats : satellites) t += static_cast<long long>(sats.size());
  return t;
}

HierarchicalDraw draw_hierarchical(const EnsembleSpec& spec,
                                   std::uint64_t draw_index) {
  std::vector<int> cu = spec.u_counts();
  if (multinomial(cu) == 0) throw std::invalid_argument("draw: empty T_n(Q_U)");
  CounterRng rng(spec.seed, draw_index);

  // canonical arrangement of the U-type
  std::vector<int> canon_u;
  canon_u.reserve(spec.n);
  for (std::size_t u = 0; u < spec.nu; ++u)
    canon_u.insert(canon_u.end(), cu[u], static_cast<int>(u));

  HierarchicalDraw draw;
  const long long mc = spec.num_clouds(), ms = spec.num_satellites();
  draw.centers.reserve(mc);
  draw.satellites.resize(mc);
  for (long long c = 0; c < mc; ++c) {
    std::vector<int> un = canon_u;
    rng.shuffle(un);
    // positions of each u symbol, in order
    std::vector<std::vector<int>> pos(spec.nu);
    for (int i = 0; i < spec.n; ++i) pos[un[i]].push_back(i);
    draw.satellites[c].reserve(ms);
    for (long long s = 0; s < ms; ++s) {
      std::vector<int> xn(spec.n, 0);
      for (std::size_t u = 0; u < spec.nu; ++u) {
        if (pos[u].empty()) continue;
        std::vector<int> block;
        std::vector<int> cx = spec.x_counts_given_u(u);
        for (std::size_t x = 0; x < spec.nx; ++x)
          block.insert(block.end(), cx[x], static_cast<int>(x));
        rng.shuffle(block);
        for (std::size_t k = 0; k < pos[u].size(); ++k) xn[pos[u][k]] = block[k];
      }
      draw.satellites[c].push_back(std::move(xn));
    }
    draw.centers.push_back(std::move(un));
  }
  return draw;
}

EnumeratorTally enumerate_tally(const HierarchicalDraw& draw,
                                const std::vector<int>& y, std::size_t nu,
                                std::size_t nx, std::size_t ny) {
  EnumeratorTally tally;
  for (std::size_t c = 0; c < draw.centers.size(); ++c) {
    TypeDescriptor tn = joint_type(draw.centers[c], y, nu, ny);
    ++tally.n_counts[tn.counts];
    ++tally.n_total;
    for (const auto& sat : draw.satellites[c]) {
      TypeDescriptor tm = joint_type3(draw.centers[c], sat, y, nu, nx, ny);
      ++tally.m_counts[tm.counts];
      ++tally.m_total;
    }
  }
  return tally;
}

namespace {

// |T_n(Q_{A|B}, b^n)| = prod_b multinomial(counts of A within the b-cells).
u128 conditional_class_size(const std::vector<int>& joint_counts, std::size_t na,
                            std::size_t nb) {
  // joint_counts indexed a*nb + b
  u128 size = 1;
  for (std::size_t b = 0; b < nb; ++b) {
    std::vector<int> col(na);
    for (std::size_t a = 0; a < na; ++a) col[a] = joint_counts[a * nb + b];
    u128 m = multinomial(col);
    if (m != 0 && size > ~u128(0) / m)
      throw std::overflow_error("conditional_class_size: overflow");
    size *= m;
  }
  return size;
}

}  // namespace

double enumerator_expectation_n(const EnsembleSpec& spec,
                                const TypeDescriptor& q_uy,
                                const std::vector<int>& y, std::size_t ny) {
  if (q_uy.alphabet() != spec.nu * ny || q_uy.n != spec.n)
    throw std::invalid_argument("enumerator_expectation_n: shape mismatch");
  // marginals must match Q_U and the type of y^n
  std::vector<int> cu = spec.u_counts();
  TypeDescriptor ty = TypeDescriptor::of_sequence(y, ny);
  for (std::size_t u = 0; u < spec.nu; ++u) {
    int s = 0;
    for (std::size_t yy = 0; yy < ny; ++yy) s += q_uy.counts[u * ny + yy];
    if (s != cu[u]) return 0.0;
  }
  for (std::size_t yy = 0; yy < ny; ++yy) {
    int s = 0;
    for (std::size_t u = 0; u < spec.nu; ++u) s += q_uy.counts[u * ny + yy];
    if (s != ty.counts[yy]) return 0.0;
  }
  u128 cond = conditional_class_size(q_uy.counts, spec.nu, ny);
  u128 full = multinomial(cu);
  return static_cast<double>(spec.num_clouds()) * u128_to_double(cond) /
         u128_to_double(full);
}

double enumerator_expectation_m(const EnsembleSpec& spec,
                                const TypeDescriptor& q_uxy,
                                const std::vector<int>& y, std::size_t ny) {
  if (q_uxy.alphabet() != spec.nu * spec.nx * ny || q_uxy.n != spec.n)
    throw std::invalid_argument("enumerator_expectation_m: shape mismatch");
  // (U,X) marginal must equal the ensemble joint type
  for (std::size_t u = 0; u < spec.nu; ++u)
    for (std::size_t x = 0; x < spec.nx; ++x) {
      int s = 0;
      for (std::size_t yy = 0; yy < ny; ++yy)
        s += q_uxy.counts[(u * spec.nx + x) * ny + yy];
      if (s != spec.q_ux.counts[u * spec.nx + x]) return 0.0;
    }
  // Y marginal must equal the type of y^n
  TypeDescriptor ty = TypeDescriptor::of_sequence(y, ny);
  for (std::size_t yy = 0; yy < ny; ++yy) {
    int s = 0;
    for (std::size_t u = 0; u < spec.nu; ++u)
      for (std::size_t x = 0; x < spec.nx; ++x)
        s += q_uxy.counts[(u * spec.nx + x) * ny + yy];
    if (s != ty.counts[yy]) return 0.0;
  }
  // P[(U, y) in T(Q_UY)]
  std::vector<int> uy(spec.nu * ny, 0);
  for (std::size_t u = 0; u < spec.nu; ++u)
    for (std::size_t x = 0; x < spec.nx; ++x)
      for (std::size_t yy = 0; yy < ny; ++yy)
        uy[u * ny + yy] += q_uxy.counts[(u * spec.nx + x) * ny + yy];
  u128 cond_uy = conditional_class_size(uy, spec.nu, ny);
  u128 full_u = multinomial(spec.u_counts());
  double p_center = u128_to_double(cond_uy) / u128_to_double(full_u);

  // P[X in T(Q_{X|UY}, u, y) | X uniform on T(Q_{X|U}, u)]
  // numerator: prod over (u,y) cells of multinomial of the x-counts
  u128 num = 1;
  for (std::size_t u = 0; u < spec.nu; ++u)
    for (std::size_t yy = 0; yy < ny; ++yy) {
      std::vector<int> cell(spec.nx);
      for (std::size_t x = 0; x < spec.nx; ++x)
        cell[x] = q_uxy.counts[(u * spec.nx + x) * ny + yy];
      u128 m = multinomial(cell);
      if (m != 0 && num > ~u128(0) / m)
        throw std::overflow_error("enumerator_expectation_m: overflow");
      num *= m;
    }
  u128 den = 1;
  for (std::size_t u = 0; u < spec.nu; ++u) {
    u128 m = multinomial(spec.x_counts_given_u(u));
    if (m != 0 && den > ~u128(0) / m)
      throw std::overflow_error("enumerator_expectation_m: overflow");
    den *= m;
  }
  double p_sat = u128_to_double(num) / u128_to_double(den);
  return static_cast<double>(spec.num_clouds()) *
         static_cast<double>(spec.num_satellites()) * p_center * p_sat;
}

namespace {

bool triple_close(const JointTriple& a, const JointTriple& b, double tol) {
  if (a.nu() != b.nu() || a.nx() != b.nx() || a.ny() != b.ny()) return false;
  for (std::size_t u = 0; u < a.nu(); ++u)
    for (std::size_t x = 0; x < a.nx(); ++x)
      for (std::size_t y = 0; y < a.ny(); ++y)
        if (std::abs(a(u, x, y) - b(u, x, y)) > tol) return false;
  return true;
}

}  // namespace

double delta_lambda(const JointTriple& q, const JointTriple& qbar, double lambda,
                    double rho, double rho_c) {
  InfoMeasures mq = info_measures(q);
  InfoMeasures mqb = info_measures(qbar);
  double max_q = std::max(std::max(mq.i_u_y - rho_c, 0.0), mq.i_ux_y - rho);
  double max_qb = std::max(std::max(mqb.i_u_y - rho_c, 0.0), mqb.i_ux_y - rho);
  return (1.0 - lambda) * (rho - mq.i_ux_y) - lambda * max_q +
         lambda * (rho - mqb.i_ux_y) - (1.0 - lambda) * max_qb;
}

double correlation_exponent_formula(const JointTriple& q, const JointTriple& qbar,
                                    double lambda, double rho, double rho_c) {
  JointPmf q_ux = q.marginal_ux(), qb_ux = qbar.marginal_ux();
  for (std::size_t u = 0; u < q_ux.nx(); ++u)
    for (std::size_t x = 0; x < q_ux.ny(); ++x)
      if (std::abs(q_ux(u, x) - qb_ux(u, x)) > 1e-9)
        throw std::invalid_argument("correlation formula: Q_UX mismatch");
  Pmf qy = q.marginal_y(), qby = qbar.marginal_y();
  for (std::size_t y = 0; y < qy.size(); ++y)
    if (std::abs(qy[y] - qby[y]) > 1e-9)
      throw std::invalid_argument("correlation formula: Q_Y mismatch");

  if (triple_close(q, qbar, 1e-12)) {
    InfoMeasures m = info_measures(q);
    return rho - m.i_ux_y;
  }
  double base = delta_lambda(q, qbar, lambda, rho, rho_c);
  // same (U,Y) marginal?
  JointPmf q_uy = q.marginal_uy(), qb_uy = qbar.marginal_uy();
  bool same_uy = true;
  for (std::size_t u = 0; u < q_uy.nx() && same_uy; ++u)
    for (std::size_t y = 0; y < q_uy.ny(); ++y)
      if (std::abs(q_uy(u, y) - qb_uy(u, y)) > 1e-12) {
        same_uy = false;
        break;
      }
  if (!same_uy) return base;
  InfoMeasures m = info_measures(q);
  return base - std::max(m.i_u_y - rho_c, 0.0);
}

}  // namespace dht
