#include <cmath>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

double minkowski(const Mat& x, const Mat& y) {
  return lorentz_inner(x.col(0), y.col(0));
}

class Lorentz final : public Manifold {
 public:
  explicit Lorentz(int n) : n_(n) {}

  ManifoldKind kind() const override { return ManifoldKind::lorentz; }
  std::string spec() const override { return "lorentz:" + std::to_string(n_); }
  Eigen::Index rows() const override { return n_ + 1; }
  Eigen::Index cols() const override { return 1; }
  int dim() const override { return n_; }
  bool compact() const override { return false; }
  Mat base_point() const override {
    Mat x = Mat::Zero(n_ + 1, 1);
    x(0, 0) = 1.0;
    return x;
  }

  double inner(const Mat&, const Mat& u, const Mat& v) const override {
    return minkowski(u, v);
  }

  // -<x, y>_L, checked against the hyperboloid domain.
  static double alpha(const Mat& x, const Mat& y) {
    const double a = -minkowski(x, y);
    if (!(a >= 1.0 - 1e-9)) {
      fail(ErrorCode::numerical_domain,
           "lorentz: -<x,y>_L < 1, points are not on the hyperboloid");
    }
    return std::max(a, 1.0);
  }

  // alpha - 1. Near the diagonal it is formed as <y - x, y - x>_L / 2 to
  // avoid cancellation; far apart that form cancels instead.
  static double alpha_minus_one(const Mat& x, const Mat& y) {
    const double a = -minkowski(x, y);
    if (a > 2.0) return a - 1.0;
    const Mat diff = y - x;
    return 0.5 * std::max(0.0, minkowski(diff, diff));
  }

  // acosh(alpha) = 2 asinh(sqrt((alpha - 1) / 2)).
  static double geodesic(const Mat& x, const Mat& y) {
    return 2.0 * std::asinh(std::sqrt(0.5 * alpha_minus_one(x, y)));
  }

  double distance(const Mat& x, const Mat& y) const override {
    alpha(x, y);
    return geodesic(x, y);
  }

  Mat exp_map(const Mat& x, const Mat& v) const override {
    const double nv = std::sqrt(std::max(0.0, minkowski(v, v)));
    if (nv == 0.0) return x;
    return repair(std::cosh(nv) * x + (std::sinh(nv) / nv) * v);
  }

  Mat log_map(const Mat& x, const Mat& y) const override {
    const double a = alpha(x, y);
    return log_with(x, y, a, geodesic(x, y));
  }

  Mat project(const Mat& x, const Mat& g) const override {
    return g + minkowski(g, x) * x;
  }

  // The metric tensor diag(-1, 1, ..., 1) is inverted before projecting.
  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    Mat h = g;
    h(0, 0) = -h(0, 0);
    return project(x, h);
  }

  // Exact parallel transport along the connecting geodesic.
  Mat transport(const Mat& x, const Mat& y, const Mat& v) const override {
    const double a = std::max(1.0, -minkowski(x, y));
    const Mat w = y - a * x;
    return v + (minkowski(w, v) / (a + 1.0)) * (x + y);
  }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    // Parallel transport of the standard basis at the origin o = e_0.
    std::vector<Mat> basis;
    const double x0 = x(0, 0);
    Mat o_plus_x = x;
    o_plus_x(0, 0) += 1.0;
    for (int i = 1; i <= n_; ++i) {
      Mat b = (x(i, 0) / (x0 + 1.0)) * o_plus_x;
      b(i, 0) += 1.0;
      basis.push_back(std::move(b));
    }
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    if (x.rows() != n_ + 1 || x.cols() != 1 || !x.allFinite() ||
        !(x(0, 0) > 0.0) ||
        std::abs(minkowski(x, x) + 1.0) > tol * std::max(1.0, x(0, 0) * x(0, 0))) {
      fail(ErrorCode::invalid_input, "lorentz: point is not on the hyperboloid");
    }
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    if (v.rows() != x.rows() || v.cols() != 1 ||
        std::abs(minkowski(v, x)) > tol * std::max(1.0, v.norm() * x(0, 0))) {
      fail(ErrorCode::invalid_input, "lorentz: vector is not tangent");
    }
  }
  Mat repair(const Mat& x) const override {
    Mat y = x;
    y(0, 0) = std::sqrt(1.0 + x.bottomRows(n_).squaredNorm());
    return y;
  }

  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    const double d = geodesic(x, y);
    grad_x = -2.0 * log_with(x, y, 0.0, d);
    grad_y = -2.0 * log_with(y, x, 0.0, d);
    return d * d;
  }

 private:
  // ||y - a x||_L = sinh(d); using d directly avoids the cancellation in
  // the Minkowski norm of a short vector.
  // y - a x is formed as (y - x) - (a - 1) x.
  static Mat log_with(const Mat& x, const Mat& y, double, double d) {
    if (d == 0.0) return Mat::Zero(x.rows(), 1);
    const Mat diff = y - x;
    const double a_minus_one = alpha_minus_one(x, y);
    const double coef = d > 1e-12 ? d / std::sinh(d) : 1.0;
    return coef * (diff - a_minus_one * x);
  }

  int n_;
};

}  // namespace

ManifoldPtr make_lorentz(int n) {
  if (n < 1) fail(ErrorCode::invalid_input, "lorentz: dimension must be >= 1");
  return std::make_shared<Lorentz>(n);
}

}  // namespace matman
