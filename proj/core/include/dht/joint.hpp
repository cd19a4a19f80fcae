#pragma once

#include <cstddef>
#include <vector>

#include "dht/pmf.hpp"

namespace dht {

/// A joint pmf over a pair of finite alphabets, stored row-major (rows = X).
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::size_t nx, std::size_t ny);
  explicit JointPmf(std::vector<std::vector<double>> probs);

  static JointPmf from_marginal_channel(const Pmf& px, const Channel& ch);
  static JointPmf product(const Pmf& px, const Pmf& py);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * ny_ + y]; }
  double& at(std::size_t x, std::size_t y) { return p_[x * ny_ + y]; }
  const std::vector<double>& flat() const { return p_; }

  Pmf marginal_x() const;
  Pmf marginal_y() const;
  // Conditional rows; defined only on positive-marginal rows, other rows are
  // filled uniformly (they carry zero weight wherever they are used).
  Channel conditional_y_given_x() const;

  // Flatten to a Pmf over the product alphabet (index = x*ny + y).
  Pmf flatten() const;

  double mutual_information() const;  // nats

 private:
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> p_;
  void validate();
};

double kl(const JointPmf& q, const JointPmf& p);

struct InfoMeasures {
  double h_x;        // H(Q_X)
  double h_x_given_u;
  double i_u_y;      // I(U;Y)
  double i_ux_y;     // I(U,X;Y)
  double i_x_y_given_u;
  double i_u_x;      // I(U;X)
};

/// A joint pmf over U x X x Y.
class JointTriple {
 public:
  JointTriple() = default;
  JointTriple(std::size_t nu, std::size_t nx, std::size_t ny);

  // Compose a fixed (U,X) joint with a conditional channel Q_{Y|UX} whose
  // rows are indexed by u*nx + x.
  static JointTriple compose(const JointPmf& q_ux, const Channel& q_y_given_ux);

  std::size_t nu() const { return nu_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double operator()(std::size_t u, std::size_t x, std::size_t y) const {
    return p_[(u * nx_ + x) * ny_ + y];
  }
  double& at(std::size_t u, std::size_t x, std::size_t y) {
    return p_[(u * nx_ + x) * ny_ + y];
  }

  JointPmf marginal_ux() const;
  JointPmf marginal_uy() const;
  JointPmf marginal_xy() const;
  Pmf marginal_u() const;
  Pmf marginal_x() const;
  Pmf marginal_y() const;

  void normalize();

 private:
  std::size_t nu_ = 0, nx_ = 0, ny_ = 0;
  std::vector<double> p_;
};

InfoMeasures info_measures(const JointTriple& q);

}  // namespace dht
