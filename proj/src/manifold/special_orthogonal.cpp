#include <algorithm>
#include <cmath>
#include <numbers>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

Mat skew(const Mat& a) { return 0.5 * (a - a.transpose()); }

void require_rotation(const Mat& r, Eigen::Index n, double tol) {
  if (r.rows() != n || r.cols() != n || !r.allFinite() ||
      (r.transpose() * r - Mat::Identity(n, n)).norm() > tol ||
      std::abs(r.determinant() - 1.0) > tol) {
    fail(ErrorCode::invalid_input, "so: matrix is not a rotation");
  }
}

// Relative rotation angle in [0, pi] of a rotation matrix.
double rotation_angle(const Mat& r) {
  if (r.rows() == 2) return std::abs(std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1)));
  const Eigen::Vector3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * w.norm(), 0.5 * (r.trace() - 1.0));
}

Mat hat(const Eigen::Vector3d& w) {
  Mat k(3, 3);
  k << 0, -w(2), w(1), w(2), 0, -w(0), -w(1), w(0), 0;
  return k;
}

Mat rot_exp(const Mat& omega) {
  const Eigen::Index n = omega.rows();
  if (n == 2) {
    const double phi = 0.5 * (omega(1, 0) - omega(0, 1));
    Mat r(2, 2);
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
  }
  const Eigen::Vector3d w(omega(2, 1), omega(0, 2), omega(1, 0));
  const double theta = w.norm();
  if (theta == 0.0) return Mat::Identity(3, 3);
  const Mat k = hat(w / theta);
  return Mat::Identity(3, 3) + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
}

Mat rot_log(const Mat& r) {
  const Eigen::Index n = r.rows();
  const double theta = rotation_angle(r);
  if (std::numbers::pi - theta < 1e-8) {
    fail(ErrorCode::cut_locus, "so: log at a half-turn");
  }
  if (n == 2) {
    const double phi = std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1));
    Mat out(2, 2);
    out << 0, -phi, phi, 0;
    return out;
  }
  if (theta < 1e-12) return skew(r);
  const Eigen::Vector3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  Eigen::Vector3d axis;
  if (theta < std::numbers::pi / 2) {
    axis = w.normalized();
  } else {
    // k k^T = (sym(R) - cos(theta) I) / (1 - cos(theta)), sign from w.
    const Mat kk = (0.5 * (r + r.transpose()) - std::cos(theta) * Mat::Identity(3, 3)) /
                   (1.0 - std::cos(theta));
    Eigen::Index col = 0;
    kk.diagonal().maxCoeff(&col);
    axis = kk.col(col).normalized();
    if (axis.dot(w) < 0.0) axis = -axis;
  }
  return hat(theta * axis);
}

class SpecialOrthogonal final : public Manifold {
 public:
  explicit SpecialOrthogonal(int n) : n_(n) {}

  ManifoldKind kind() const override { return ManifoldKind::special_orthogonal; }
  std::string spec() const override { return "so:" + std::to_string(n_); }
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return n_; }
  int dim() const override { return n_ * (n_ - 1) / 2; }
  bool compact() const override { return true; }
  Mat base_point() const override { return Mat::Identity(n_, n_); }

  double inner(const Mat&, const Mat& u, const Mat& v) const override {
    return u.cwiseProduct(v).sum();
  }
  double distance(const Mat& x, const Mat& y) const override {
    return std::numbers::sqrt2 * rotation_angle(x.transpose() * y);
  }
  Mat exp_map(const Mat& x, const Mat& v) const override {
    return x * rot_exp(skew(x.transpose() * v));
  }
  Mat log_map(const Mat& x, const Mat& y) const override {
    return x * rot_log(x.transpose() * y);
  }
  Mat project(const Mat& x, const Mat& g) const override {
    return x * skew(x.transpose() * g);
  }
  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    return project(x, g);
  }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    std::vector<Mat> basis;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        Mat e = Mat::Zero(n_, n_);
        e(i, j) = -std::sqrt(0.5);
        e(j, i) = std::sqrt(0.5);
        basis.push_back(x * e);
      }
    }
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    require_rotation(x, n_, tol);
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    const Mat w = x.transpose() * v;
    if (v.rows() != n_ || v.cols() != n_ ||
        (w + w.transpose()).norm() > tol * std::max(1.0, v.norm())) {
      fail(ErrorCode::invalid_input, "so: vector is not tangent");
    }
  }
  Mat repair(const Mat& x) const override {
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat u = svd.matrixU();
    if ((u * svd.matrixV().transpose()).determinant() < 0.0) u.col(n_ - 1) *= -1.0;
    return u * svd.matrixV().transpose();
  }

 private:
  int n_;
};

}  // namespace

ManifoldPtr make_special_orthogonal(int n) {
  if (n != 2 && n != 3) fail(ErrorCode::invalid_input, "so: only n in {2, 3}");
  return std::make_shared<SpecialOrthogonal>(n);
}

double so_distance(const Mat& r1, const Mat& r2) {
  const Eigen::Index n = r1.rows();
  if (n != 2 && n != 3) fail(ErrorCode::invalid_input, "so: only n in {2, 3}");
  require_rotation(r1, n, 1e-8);
  require_rotation(r2, n, 1e-8);
  return std::numbers::sqrt2 * rotation_angle(r1.transpose() * r2);
}

}  // namespace matman
