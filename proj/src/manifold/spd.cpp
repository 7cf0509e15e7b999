#include <cmath>

#include "matman/error.hpp"
#include "matman/manifold.hpp"
#include "matman/smallmat.hpp"

namespace matman {
namespace {

constexpr double kEigFloor = 1e-10;

// Fixed-size kernels for the 2x2 and 3x3 cases that dominate training; the
// dynamic instantiation covers everything else.
template <int N>
struct Kernel {
  using M = Eigen::Matrix<double, N, N>;
  using V = Eigen::Matrix<double, N, 1>;

  static M cholesky(const M& a) {
    if constexpr (N == Eigen::Dynamic) {
      return smallmat::cholesky(0.5 * (a + a.transpose()));
    } else {
      Eigen::LLT<M> llt(a);
      if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0)) {
        fail(ErrorCode::not_positive_definite, "spd: cholesky failed");
      }
      return llt.matrixL();
    }
  }

  static void eig(const M& a, V& values, M& vectors) {
    if constexpr (N == 2) {
      smallmat::eig_2x2(a, values, vectors);
    } else if constexpr (N == 3) {
      if (!smallmat::eig_3x3(a, values, vectors)) {
        auto e = smallmat::jacobi_eig(a);
        values = e.values;
        vectors = e.vectors;
      }
    } else {
      auto e = smallmat::sym_eig(a);
      values = e.values;
      vectors = e.vectors;
    }
  }

  // Eigenpairs of L^-1 B L^-T with A = L L^T.
  static void relative(const M& a, const M& b, M& l, V& values, M& vectors) {
    l = cholesky(a);
    const M half = l.template triangularView<Eigen::Lower>().solve(b);
    M x = l.template triangularView<Eigen::Lower>().solve(half.transpose());
    x = 0.5 * (x + x.transpose());
    eig(x, values, vectors);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (!(values(i) > 0.0)) {
        fail(ErrorCode::not_positive_definite, "spd: relative eigenvalue <= 0");
      }
    }
  }

  static double sqdist(const M& a, const M& b) {
    M l, u;
    V lam;
    relative(a, b, l, lam, u);
    return lam.array().log().square().sum();
  }

  static double sqdist_grad(const M& a, const M& b, Mat& ga, Mat& gb) {
    M l, u;
    V lam;
    relative(a, b, l, lam, u);
    const V loglam = lam.array().log();
    const M lu = l * u;
    ga = -2.0 * lu * loglam.asDiagonal() * lu.transpose();
    gb = 2.0 * lu * lam.cwiseProduct(loglam).asDiagonal() * lu.transpose();
    return loglam.squaredNorm();
  }

  static double logdet(const M& a) {
    return 2.0 * cholesky(a).diagonal().array().log().sum();
  }

  static double stein(const M& a, const M& b) {
    const double v = logdet(0.5 * (a + b)) - 0.5 * (logdet(a) + logdet(b));
    return std::max(0.0, v);
  }

  // Riemannian gradients A G_A A with G_A = (A+B)^-1 - A^-1 / 2.
  static double stein_grad(const M& a, const M& b, Mat& ga, Mat& gb) {
    const M sum = a + b;
    Eigen::LLT<M> llt(sum);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::not_positive_definite, "stein: cholesky of A+B failed");
    }
    const M sa = llt.solve(a);
    const M sb = llt.solve(b);
    M ra = a * sa - 0.5 * a;
    M rb = b * sb - 0.5 * b;
    ga = 0.5 * (ra + ra.transpose());
    gb = 0.5 * (rb + rb.transpose());
    return stein(a, b);
  }
};

template <template <int> class F, typename... Args>
auto dispatch(Eigen::Index n, Args&&... args) {
  switch (n) {
    case 2: return F<2>::run(std::forward<Args>(args)...);
    case 3: return F<3>::run(std::forward<Args>(args)...);
    default: return F<Eigen::Dynamic>::run(std::forward<Args>(args)...);
  }
}

template <int N>
struct SqDist {
  static double run(const Mat& a, const Mat& b) { return Kernel<N>::sqdist(a, b); }
};
template <int N>
struct SqDistGrad {
  static double run(const Mat& a, const Mat& b, Mat& ga, Mat& gb) {
    return Kernel<N>::sqdist_grad(a, b, ga, gb);
  }
};
template <int N>
struct Stein {
  static double run(const Mat& a, const Mat& b) { return Kernel<N>::stein(a, b); }
};
template <int N>
struct SteinGrad {
  static double run(const Mat& a, const Mat& b, Mat& ga, Mat& gb) {
    return Kernel<N>::stein_grad(a, b, ga, gb);
  }
};

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat floor_spectrum(const Mat& a) {
  const Mat s = sym(a);
  auto e = smallmat::sym_eig(s);
  if (e.values.minCoeff() >= kEigFloor) return s;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    e.values(i) = std::max(e.values(i), kEigFloor);
  }
  return sym(e.vectors * e.values.asDiagonal() * e.vectors.transpose());
}

class Spd final : public Manifold {
 public:
  Spd(int n, bool stein) : n_(n), stein_(stein) {}

  ManifoldKind kind() const override {
    return stein_ ? ManifoldKind::spd_stein : ManifoldKind::spd_canonical;
  }
  std::string spec() const override {
    return (stein_ ? "stein:" : "spd:") + std::to_string(n_);
  }
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return n_; }
  int dim() const override { return n_ * (n_ + 1) / 2; }
  bool compact() const override { return false; }
  Mat base_point() const override { return Mat::Identity(n_, n_); }

  // tr(A^-1 U A^-1 V) = <L^-1 U L^-T, L^-1 V L^-T>_F.
  double inner(const Mat& x, const Mat& u, const Mat& v) const override {
    const Mat l = smallmat::cholesky(sym(x));
    return whiten(l, u).cwiseProduct(whiten(l, v)).sum();
  }

  double distance(const Mat& x, const Mat& y) const override {
    return std::sqrt(std::max(0.0, dispatch<SqDist>(n_, x, y)));
  }

  // A exp(A^-1 P) = L exp(L^-1 P L^-T) L^T.
  Mat exp_map(const Mat& x, const Mat& v) const override {
    const Mat l = smallmat::cholesky(sym(x));
    const Mat e = smallmat::spd_fn(whiten(l, v), smallmat::SpdFunction::exp);
    return sym(l * e * l.transpose());
  }

  Mat log_map(const Mat& x, const Mat& y) const override {
    const Mat l = smallmat::cholesky(sym(x));
    const Mat g = smallmat::spd_fn(whiten(l, y), smallmat::SpdFunction::log);
    return sym(l * g * l.transpose());
  }

  Mat project(const Mat&, const Mat& g) const override { return sym(g); }

  Mat egrad_to_rgrad(const Mat& x, const Mat& g) const override {
    return sym(x * sym(g) * x);
  }

  // Second-order retraction A + P + P A^-1 P / 2 with an eigenvalue floor.
  Mat retract(const Mat& x, const Mat& v) const override {
    const Mat p = sym(v);
    Eigen::LLT<Mat> llt(sym(x));
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::not_positive_definite, "spd: retraction base is not SPD");
    }
    return floor_spectrum(x + p + 0.5 * p * llt.solve(p));
  }

  std::vector<Mat> tangent_basis(const Mat& x) const override {
    const Mat l = smallmat::cholesky(sym(x));
    std::vector<Mat> basis;
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        Mat e = Mat::Zero(n_, n_);
        if (i == j) {
          e(i, i) = 1.0;
        } else {
          e(i, j) = e(j, i) = std::sqrt(0.5);
        }
        basis.push_back(l * e * l.transpose());
      }
    }
    return basis;
  }

  void check_point(const Mat& x, double tol) const override {
    if (x.rows() != n_ || x.cols() != n_ || !x.allFinite()) {
      fail(ErrorCode::invalid_input, "spd: bad point shape");
    }
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((x - x.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
      fail(ErrorCode::invalid_input, "spd: point is not symmetric");
    }
    if (!(smallmat::sym_eigvals(sym(x)).minCoeff() > kEigFloor * 0.5)) {
      fail(ErrorCode::invalid_input, "spd: point is not positive definite");
    }
  }
  void check_tangent(const Mat& x, const Mat& v, double tol) const override {
    check_point(x, tol);
    if (v.rows() != n_ || v.cols() != n_ ||
        (v - v.transpose()).cwiseAbs().maxCoeff() >
            tol * std::max(1.0, v.cwiseAbs().maxCoeff())) {
      fail(ErrorCode::invalid_input, "spd: tangent is not symmetric");
    }
  }
  Mat repair(const Mat& x) const override { return floor_spectrum(x); }

  double model_sqdist(const Mat& x, const Mat& y) const override {
    return stein_ ? dispatch<Stein>(n_, x, y) : dispatch<SqDist>(n_, x, y);
  }
  double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                           Mat& grad_y) const override {
    return stein_ ? dispatch<SteinGrad>(n_, x, y, grad_x, grad_y)
                  : dispatch<SqDistGrad>(n_, x, y, grad_x, grad_y);
  }

 private:
  static Mat whiten(const Mat& l, const Mat& u) {
    const auto lt = l.triangularView<Eigen::Lower>();
    Mat w = lt.solve(u);
    w = lt.solve(w.transpose().eval());
    return sym(w);
  }

  int n_;
  bool stein_;
};

}  // namespace

ManifoldPtr make_spd(int n) {
  if (n < 1) fail(ErrorCode::invalid_input, "spd: dimension must be >= 1");
  return std::make_shared<Spd>(n, false);
}

ManifoldPtr make_stein(int n) {
  if (n < 1) fail(ErrorCode::invalid_input, "stein: dimension must be >= 1");
  return std::make_shared<Spd>(n, true);
}

double stein_divergence(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    fail(ErrorCode::invalid_input, "stein: shape mismatch");
  }
  return dispatch<Stein>(a.rows(), a, b);
}

Mat stein_gradient(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    fail(ErrorCode::invalid_input, "stein: shape mismatch");
  }
  smallmat::cholesky(sym(a));
  smallmat::cholesky(sym(b));
  const Eigen::LLT<Mat> sum(a + b);
  const Eigen::LLT<Mat> la(a);
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  return sym(sum.solve(id) - 0.5 * la.solve(id));
}

}  // namespace matman
