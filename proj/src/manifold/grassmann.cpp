#include <algorithm>
#include <cmath>
#include <numbers>

#include "matman/error.hpp"
#include "matman/manifold.hpp"
#include "matman/smallmat.hpp"

namespace matman {
namespace {

// B V = A U diag(cos theta) + Q with Q orthogonal to span(A) and
// ||q_i|| = sin(theta_i).
struct PrincipalAngles {
  Mat u;
  Mat q;
  Eigen::VectorXd theta;
  Eigen::VectorXd sines;
};

PrincipalAngles principal_angles(const Mat& a, const Mat& b) {
  const auto s = smallmat::svd(a.transpose() * b);
  PrincipalAngles out;
  out.u = s.left;
  const Mat bv = b * s.right;
  out.q = bv - a * (s.left * s.singular_values.cwiseMin(1.0).asDiagonal());
  out.q -= a * (a.transpose() * out.q);
  const Eigen::Index k = s.singular_values.size();
  out.theta.resize(k);
  out.sines.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.sines(i) = out.q.col(i).norm();
    out.theta(i) = std::atan2(out.sines(i), std::clamp(s.singular_values(i), 0.0, 1.0));
  }
  return out;
}

Mat log_from(const PrincipalAngles& p) {
  Eigen::VectorXd coef(p.theta.size());
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    coef(i) = p.sines(i) > 1e-300 ? p.theta(i) / p.sines(i) : 1.0;
  }
  return p.q * coef.asDiagonal() * p.u.transpose();
}

// Y (Y^T Y)^-1/2, the nearest matrix with orthonormal columns.
Mat polar(const Mat& y) {
  if (y.cols() == 1) return y / y.norm();
  const Mat g = y.transpose() * y;
  return y * smallmat::spd_fn(0.5 * (g + g.transpose()), smallmat::SpdFunction::inv_sqrt);
}

class Grassmann final : public Manifold {
 public:
  Grassmann(int k, int n) : k_(k), n_(n) {}

  ManifoldKind kind() const override { return ManifoldKind::grassmann; }
  std::string spec() const override {
    return "grassmann:" + std::to_string(k_) + "," + std::to_string(n_);
  }
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return k_; }
  int dim() const override { return k_ * (n_ - k_); }
  bool compact() const override { return true; }
  Mat base_point() const override { return Mat::Identity(n_, k_); }

  double inner(const Mat&, const Mat& u, const Mat& v) const override {
    return u.cwiseProduct(v).sum();
  }

  double distance(const Mat& x, const Mat& y) const override {
    return principal_angles(x, y).theta.norm();
  }

  Mat exp_map(const Mat& x, const Mat& v) const override {
    if (v.norm() == 0.0) return x;
    const auto s = smallmat::svd(v);
    Eigen::VectorXd c(s.singular_values.size()), sn(s.singular_values.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      c(i) = std::cos(s.singular_values(i));
      sn(i) = std::sin(s.singular_values(i));
    }
    const Mat y = (x * s.right * c.asDiagonal() + s.left * sn.asDiagonal()) *
                  s.right.transpose();
    return polar(y);
  }

  Mat log_map(const Mat& x, const Mat& y) const override {
    const auto p = principal_angles(x, y);
    if (p.theta.size() > 0 &&
        std::numbers::pi / 2 - p.theta.maxCoeff() < 1e-6) {
      fail(ErrorCode::cut_locus, "grassmann: principal angle at pi/2");
    }
    return log_from(p);
  }

  Mat project(const Mat& x, const Mat& g) const override {
    return g - x * (x.transpose() * g);
  }
  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    return project(x, g);
  }

  Mat retract(const Mat& x, const Mat& v) const override { return polar(x + v); }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    Eigen::HouseholderQR<Mat> qr(x);
    const Mat q = qr.householderQ();
    std::vector<Mat> basis;
    for (int i = k_; i < n_; ++i) {
      for (int j = 0; j < k_; ++j) {
        Mat e = Mat::Zero(n_, k_);
        e.col(j) = q.col(i);
        basis.push_back(std::move(e));
      }
    }
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    if (x.rows() != n_ || x.cols() != k_ || !x.allFinite() ||
        (x.transpose() * x - Mat::Identity(k_, k_)).norm() > tol) {
      fail(ErrorCode::invalid_input, "grassmann: columns are not orthonormal");
    }
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    if (v.rows() != n_ || v.cols() != k_ ||
        (x.transpose() * v).norm() > tol * std::max(1.0, v.norm())) {
      fail(ErrorCode::invalid_input, "grassmann: vector is not horizontal");
    }
  }
  Mat repair(const Mat& x) const override { return polar(x); }

  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    const auto pxy = principal_angles(x, y);
    const auto pyx = principal_angles(y, x);
    grad_x = -2.0 * log_from(pxy);
    grad_y = -2.0 * log_from(pyx);
    return pxy.theta.squaredNorm();
  }

 private:
  int k_;
  int n_;
};

}  // namespace

ManifoldPtr make_grassmann(int k, int n) {
  if (k < 1 || k >= n) {
    fail(ErrorCode::invalid_input, "grassmann: requires 1 <= k < n");
  }
  return std::make_shared<Grassmann>(k, n);
}

}  // namespace matman
