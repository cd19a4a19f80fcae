#include "dht/joint.hpp"

#include <algorithm>
#include <cmath>

namespace dht {

JointPmf::JointPmf(std::size_t nx, std::size_t ny)
    : nx_(nx), ny_(ny), p_(nx * ny, 1.0 / static_cast<double>(nx * ny)) {}

JointPmf::JointPmf(std::vector<std::vector<double>> probs) {
  if (probs.empty() || probs[0].empty())
    throw std::invalid_argument("JointPmf: empty matrix");
  nx_ = probs.size();
  ny_ = probs[0].size();
  p_.reserve(nx_ * ny_);
  for (auto& row : probs) {
    if (row.size() != ny_) throw std::invalid_argument("JointPmf: ragged rows");
    p_.insert(p_.end(), row.begin(), row.end());
  }
  validate();
}

void JointPmf::validate() {
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw std::invalid_argument("JointPmf: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("JointPmf: sums to " + std::to_string(sum));
  for (double& v : p_) v /= sum;
}

JointPmf JointPmf::from_marginal_channel(const Pmf& px, const Channel& ch) {
  if (px.size() != ch.inputs())
    throw std::invalid_argument("from_marginal_channel: shape mismatch");
  JointPmf j(px.size(), ch.outputs());
  for (std::size_t x = 0; x < j.nx_; ++x)
    for (std::size_t y = 0; y < j.ny_; ++y) j.at(x, y) = px[x] * ch(x, y);
  return j;
}

JointPmf JointPmf::product(const Pmf& px, const Pmf& py) {
  JointPmf j(px.size(), py.size());
  for (std::size_t x = 0; x < j.nx_; ++x)
    for (std::size_t y = 0; y < j.ny_; ++y) j.at(x, y) = px[x] * py[y];
  return j;
}

Pmf JointPmf::marginal_x() const {
  std::vector<double> m(nx_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) m[x] += (*this)(x, y);
  return Pmf(std::move(m));
}

Pmf JointPmf::marginal_y() const {
  std::vector<double> m(ny_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) m[y] += (*this)(x, y);
  return Pmf(std::move(m));
}

Channel JointPmf::conditional_y_given_x() const {
  std::vector<std::vector<double>> rows(nx_, std::vector<double>(ny_));
  for (std::size_t x = 0; x < nx_; ++x) {
    double mx = 0.0;
    for (std::size_t y = 0; y < ny_; ++y) mx += (*this)(x, y);
    for (std::size_t y = 0; y < ny_; ++y)
      rows[x][y] = mx > 0.0 ? (*this)(x, y) / mx : 1.0 / static_cast<double>(ny_);
    // Renormalize against rounding drift.
    double s = 0.0;
    for (double v : rows[x]) s += v;
    for (double& v : rows[x]) v /= s;
  }
  return Channel(std::move(rows));
}

Pmf JointPmf::flatten() const {
  std::vector<double> v = p_;
  return Pmf(std::move(v));
}

double JointPmf::mutual_information() const {
  Pmf mx = marginal_x();
  Pmf my = marginal_y();
  double i = 0.0;
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) {
      double q = (*this)(x, y);
      if (q > 0.0) i += q * std::log(q / (mx[x] * my[y]));
    }
  return std::max(0.0, i);
}

double kl(const JointPmf& q, const JointPmf& p) {
  if (q.nx() != p.nx() || q.ny() != p.ny())
    throw std::invalid_argument("kl(JointPmf): shape mismatch");
  double d = 0.0;
  for (std::size_t x = 0; x < q.nx(); ++x)
    for (std::size_t y = 0; y < q.ny(); ++y) {
      double t = xlogratio(q(x, y), p(x, y));
      if (t == kInf) return kInf;
      d += t;
    }
  return std::max(0.0, d);
}

JointTriple::JointTriple(std::size_t nu, std::size_t nx, std::size_t ny)
    : nu_(nu), nx_(nx), ny_(ny),
      p_(nu * nx * ny, 1.0 / static_cast<double>(nu * nx * ny)) {}

JointTriple JointTriple::compose(const JointPmf& q_ux, const Channel& q_y_given_ux) {
  if (q_y_given_ux.inputs() != q_ux.nx() * q_ux.ny())
    throw std::invalid_argument("JointTriple::compose: row count mismatch");
  JointTriple t(q_ux.nx(), q_ux.ny(), q_y_given_ux.outputs());
  for (std::size_t u = 0; u < t.nu_; ++u)
    for (std::size_t x = 0; x < t.nx_; ++x)
      for (std::size_t y = 0; y < t.ny_; ++y)
        t.at(u, x, y) = q_ux(u, x) * q_y_given_ux(u * t.nx_ + x, y);
  return t;
}

JointPmf JointTriple::marginal_ux() const {
  JointPmf j(nu_, nx_);
  for (std::size_t u = 0; u < nu_; ++u)
    for (std::size_t x = 0; x < nx_; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < ny_; ++y) s += (*this)(u, x, y);
      j.at(u, x) = s;
    }
  return j;
}

JointPmf JointTriple::marginal_uy() const {
  JointPmf j(nu_, ny_);
  for (std::size_t u = 0; u < nu_; ++u)
    for (std::size_t y = 0; y < ny_; ++y) j.at(u, y) = 0.0;
  for (std::size_t u = 0; u < nu_; ++u)
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) j.at(u, y) += (*this)(u, x, y);
  return j;
}

JointPmf JointTriple::marginal_xy() const {
  JointPmf j(nx_, ny_);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) j.at(x, y) = 0.0;
  for (std::size_t u = 0; u < nu_; ++u)
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) j.at(x, y) += (*this)(u, x, y);
  return j;
}

Pmf JointTriple::marginal_u() const { return marginal_ux().marginal_x(); }
Pmf JointTriple::marginal_x() const { return marginal_ux().marginal_y(); }
Pmf JointTriple::marginal_y() const { return marginal_uy().marginal_y(); }

void JointTriple::normalize() {
  double s = 0.0;
  for (double v : p_) s += v;
  for (double& v : p_) v /= s;
}

InfoMeasures info_measures(const JointTriple& q) {
  const std::size_t nu = q.nu(), nx = q.nx(), ny = q.ny();
  JointPmf q_ux = q.marginal_ux();
  JointPmf q_uy = q.marginal_uy();
  Pmf q_u = q_ux.marginal_x();
  Pmf q_x = q_ux.marginal_y();
  Pmf q_y = q_uy.marginal_y();

  InfoMeasures m{};
  m.h_x = q_x.entropy();
  m.i_u_x = q_ux.mutual_information();
  m.h_x_given_u = std::max(0.0, m.h_x - m.i_u_x);
  m.i_u_y = q_uy.mutual_information();

  // I(U,X;Y) = sum q(u,x,y) log( q(y|u,x) / q(y) )
  double i_uxy = 0.0;
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t x = 0; x < nx; ++x) {
      double w = q_ux(u, x);
      if (w <= 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        double v = q(u, x, y);
        if (v > 0.0) i_uxy += v * std::log((v / w) / q_y[y]);
      }
    }
  m.i_ux_y = std::max(0.0, i_uxy);

  // I(X;Y|U) computed directly, per-u, so the chain identity is a real check.
  double i_xy_u = 0.0;
  for (std::size_t u = 0; u < nu; ++u) {
    double pu = q_u[u];
    if (pu <= 0.0) continue;
    // conditional joint of (X,Y) given u
    double inner = 0.0;
    std::vector<double> mx(nx, 0.0), my(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        mx[x] += q(u, x, y);
        my[y] += q(u, x, y);
      }
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        double v = q(u, x, y);
        if (v > 0.0) inner += v * std::log(v * pu / (mx[x] * my[y]));
      }
    i_xy_u += inner;
  }
  m.i_x_y_given_u = std::max(0.0, i_xy_u);
  return m;
}

}  // namespace dht
