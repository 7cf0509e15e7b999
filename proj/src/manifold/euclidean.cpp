#include <cmath>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int n) : n_(n) {}

  ManifoldKind kind() const override { return ManifoldKind::euclidean; }
  std::string spec() const override { return "euclidean:" + std::to_string(n_); }
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return 1; }
  int dim() const override { return n_; }
  bool compact() const override { return false; }
  Mat base_point() const override { return Mat::Zero(n_, 1); }

  double inner(const Mat&, const Mat& u, const Mat& v) const override {
    return u.cwiseProduct(v).sum();
  }
  double distance(const Mat& x, const Mat& y) const override {
    return (x - y).norm();
  }
  Mat exp_map(const Mat& x, const Mat& v) const override { return x + v; }
  Mat log_map(const Mat& x, const Mat& y) const override { return y - x; }
  Mat project(const Mat&, const Mat& g) const override { return g; }
  Mat egrad_to_rgrad(const Mat&, const Mat& g) const override { return g; }

  std::vector<Mat> tangent_basis(const Mat&) const override {
    std::vector<Mat> basis;
    for (int i = 0; i < n_; ++i) {
      Mat e = Mat::Zero(n_, 1);
      e(i, 0) = 1.0;
      basis.push_back(std::move(e));
    }
    return basis;
  }

  void check_point(const Mat& x, double) const override {
    if (x.rows() != n_ || x.cols() != 1 || !x.allFinite()) {
      fail(ErrorCode::invalid_input, "euclidean: bad point");
    }
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    check_point(v, tol);
  }
  Mat repair(const Mat& x) const override { return x; }

  double model_sqdist(const Mat& x, const Mat& y) const override {
    return (x - y).squaredNorm();
  }
  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    grad_x = 2.0 * (x - y);
    grad_y = -grad_x;
    return (x - y).squaredNorm();
  }

 private:
  int n_;
};

}  // namespace

ManifoldPtr make_euclidean(int n) {
  if (n < 1) fail(ErrorCode::invalid_input, "euclidean: dimension must be >= 1");
  return std::make_shared<Euclidean>(n);
}

}  // namespace matman
