#include <cmath>
#include <numbers>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

// Angle between unit vectors, accurate at both ends of [0, pi].
double unit_angle(const Mat& x, const Mat& y) {
  const double chord = (x - y).norm();
  if (chord < std::numbers::sqrt2) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  }
  return std::numbers::pi - 2.0 * std::asin(std::min(1.0, 0.5 * (x + y).norm()));
}

class Sphere final : public Manifold {
 public:
  explicit Sphere(int n) : n_(n) {}

  ManifoldKind kind() const override { return ManifoldKind::sphere; }
  std::string spec() const override { return "sphere:" + std::to_string(n_); }
  Eigen::Index rows() const override { return n_ + 1; }
  Eigen::Index cols() const override { return 1; }
  int dim() const override { return n_; }
  bool compact() const override { return true; }
  Mat base_point() const override {
    Mat x = Mat::Zero(n_ + 1, 1);
    x(0, 0) = 1.0;
    return x;
  }

  double inner(const Mat&, const Mat& u, const Mat& v) const override {
    return u.cwiseProduct(v).sum();
  }

  double distance(const Mat& x, const Mat& y) const override {
    return unit_angle(x, y);
  }

  Mat exp_map(const Mat& x, const Mat& v) const override {
    const double nv = v.norm();
    if (nv == 0.0) return x;
    Mat y = std::cos(nv) * x + (std::sin(nv) / nv) * v;
    return y / y.norm();
  }

  Mat log_map(const Mat& x, const Mat& y) const override {
    const double theta = unit_angle(x, y);
    if (std::numbers::pi - theta < 1e-8) {
      fail(ErrorCode::cut_locus, "sphere: log of an antipodal point");
    }
    return log_unchecked(x, y, theta);
  }

  Mat project(const Mat& x, const Mat& g) const override {
    return g - x.cwiseProduct(g).sum() * x;
  }
  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    return project(x, g);
  }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    Eigen::HouseholderQR<Mat> qr(x);
    const Mat q = qr.householderQ();
    std::vector<Mat> basis;
    for (int i = 1; i <= n_; ++i) basis.push_back(q.col(i));
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    if (x.rows() != n_ + 1 || x.cols() != 1 || !x.allFinite() ||
        std::abs(x.norm() - 1.0) > tol) {
      fail(ErrorCode::invalid_input, "sphere: point is not a unit vector");
    }
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    if (v.rows() != x.rows() || v.cols() != 1 ||
        std::abs(x.cwiseProduct(v).sum()) > tol * std::max(1.0, v.norm())) {
      fail(ErrorCode::invalid_input, "sphere: vector is not tangent");
    }
  }
  Mat repair(const Mat& x) const override { return x / x.norm(); }

  Mat transport(const Mat&, const Mat& y, const Mat& v) const override {
    return project(y, v);
  }

  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    const double theta = unit_angle(x, y);
    grad_x = -2.0 * log_unchecked(x, y, theta);
    grad_y = -2.0 * log_unchecked(y, x, theta);
    return theta * theta;
  }

 private:
  static Mat log_unchecked(const Mat& x, const Mat& y, double theta) {
    Mat u = y - x.cwiseProduct(y).sum() * x;
    const double s = u.norm();
    if (s < 1e-300 || theta == 0.0) return Mat::Zero(x.rows(), 1);
    return (theta / s) * u;
  }

  int n_;
};

}  // namespace

ManifoldPtr make_sphere(int n) {
  if (n < 1) fail(ErrorCode::invalid_input, "sphere: dimension must be >= 1");
  return std::make_shared<Sphere>(n);
}

}  // namespace matman
