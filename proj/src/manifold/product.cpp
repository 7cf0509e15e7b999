#include <cmath>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

class Product final : public Manifold {
 public:
  explicit Product(std::vector<ManifoldPtr> factors) : factors_(std::move(factors)) {
    Eigen::Index off = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(off);
      off += f->rows() * f->cols();
      dim_ += f->dim();
    }
    size_ = off;
  }

  ManifoldKind kind() const override { return ManifoldKind::product; }
  std::string spec() const override {
    std::string s = "product:";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += "x";
      s += "(" + factors_[i]->spec() + ")";
    }
    return s;
  }
  Eigen::Index rows() const override { return size_; }
  Eigen::Index cols() const override { return 1; }
  int dim() const override { return dim_; }
  bool compact() const override {
    for (const auto& f : factors_) {
      if (!f->compact()) return false;
    }
    return true;
  }
  Mat base_point() const override {
    Mat out(size_, 1);
    for (std::size_t i = 0; i < factors_.size(); ++i) put(out, i, factors_[i]->base_point());
    return out;
  }

  double inner(const Mat& x, const Mat& u, const Mat& v) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      s += factors_[i]->inner(part(x, i), part(u, i), part(v, i));
    }
    return s;
  }

  double distance(const Mat& x, const Mat& y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const double d = factors_[i]->distance(part(x, i), part(y, i));
      s += d * d;
    }
    return std::sqrt(s);
  }

  Mat exp_map(const Mat& x, const Mat& v) const override {
    return map2(x, v, [](const Manifold& f, const Mat& a, const Mat& b) { return f.exp_map(a, b); });
  }
  Mat log_map(const Mat& x, const Mat& y) const override {
    return map2(x, y, [](const Manifold& f, const Mat& a, const Mat& b) { return f.log_map(a, b); });
  }
  Mat project(const Mat& x, const Mat& g) const override {
    return map2(x, g, [](const Manifold& f, const Mat& a, const Mat& b) { return f.project(a, b); });
  }
  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    return map2(x, g, [](const Manifold& f, const Mat& a, const Mat& b) {
      return f.egrad_to_rgrad(a, b);
    });
  }
  Mat retract(const Mat& x, const Mat& v) const override {
    return map2(x, v, [](const Manifold& f, const Mat& a, const Mat& b) { return f.retract(a, b); });
  }
  Mat transport(const Mat& x, const Mat& y, const Mat& v) const override {
    Mat out(size_, 1);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      put(out, i, factors_[i]->transport(part(x, i), part(y, i), part(v, i)));
    }
    return out;
  }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    std::vector<Mat> basis;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      for (const Mat& b : factors_[i]->tangent_basis(part(x, i))) {
        Mat e = Mat::Zero(size_, 1);
        put(e, i, b);
        basis.push_back(std::move(e));
      }
    }
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    if (x.rows() != size_ || x.cols() != 1) {
      fail(ErrorCode::invalid_input, "product: bad point shape");
    }
    for (std::size_t i = 0; i < factors_.size(); ++i) factors_[i]->check_point(part(x, i), tol);
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    if (x.rows() != size_ || v.rows() != size_ || x.cols() != 1 || v.cols() != 1) {
      fail(ErrorCode::invalid_input, "product: bad tangent shape");
    }
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      factors_[i]->check_tangent(part(x, i), part(v, i), tol);
    }
  }
  Mat repair(const Mat& x) const override {
    Mat out(size_, 1);
    for (std::size_t i = 0; i < factors_.size(); ++i) put(out, i, factors_[i]->repair(part(x, i)));
    return out;
  }

  double model_sqdist(const Mat& x, const Mat& y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      s += factors_[i]->model_sqdist(part(x, i), part(y, i));
    }
    return s;
  }
  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    grad_x.resize(size_, 1);
    grad_y.resize(size_, 1);
    double s = 0.0;
    Mat gx, gy;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      s += factors_[i]->model_sqdist_grad(part(x, i), part(y, i), gx, gy);
      put(grad_x, i, gx);
      put(grad_y, i, gy);
    }
    return s;
  }

  const std::vector<ManifoldPtr>& factors() const { return factors_; }

 private:
  Mat part(const Mat& x, std::size_t i) const {
    const auto& f = *factors_[i];
    return Eigen::Map<const Mat>(x.data() + offsets_[i], f.rows(), f.cols());
  }
  void put(Mat& out, std::size_t i, const Mat& v) const {
    out.block(offsets_[i], 0, v.size(), 1) =
        Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  template <typename F>
  Mat map2(const Mat& x, const Mat& y, F&& fn) const {
    Mat out(size_, 1);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      put(out, i, fn(*factors_[i], part(x, i), part(y, i)));
    }
    return out;
  }

  std::vector<ManifoldPtr> factors_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index size_ = 0;
  int dim_ = 0;
};

}  // namespace

ManifoldPtr make_product(std::vector<ManifoldPtr> factors) {
  if (factors.size() < 2) fail(ErrorCode::invalid_input, "product: needs at least two factors");
  for (const auto& f : factors) {
    if (!f) fail(ErrorCode::invalid_input, "product: null factor");
  }
  return std::make_shared<Product>(std::move(factors));
}

}  // namespace matman
