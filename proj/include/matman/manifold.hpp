#pragma once

// Uniform interface over the embedding spaces. Points and tangent vectors are
// dense matrices whose shape is fixed by the manifold (rows() x cols()):
//
//   euclidean:n      n x 1 vector
//   sphere:n         (n+1) x 1 unit vector
//   lorentz:n        (n+1) x 1 vector on the upper hyperboloid sheet
//   spd:n, stein:n   n x n symmetric positive-definite matrix
//   grassmann:k,n    n x k matrix with orthonormal columns (any representative)
//   so:n             n x n rotation, n in {2, 3}
//   product:(..)x(..) column vector holding the flattened factor points
//
// The trailing integer of sphere/lorentz/euclidean specs is the intrinsic
// dimension.

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace matman {

using Mat = Eigen::MatrixXd;

enum class ManifoldKind {
  euclidean,
  sphere,
  lorentz,
  spd_canonical,
  spd_stein,
  grassmann,
  product,
  special_orthogonal,
};

const char* to_string(ManifoldKind kind);

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  /// Canonical textual form, parseable by parse_manifold().
  virtual std::string spec() const = 0;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  /// Intrinsic dimension.
  virtual int dim() const = 0;
  virtual bool compact() const = 0;

  /// Origin / north pole / identity / first-k-columns frame.
  virtual Mat base_point() const = 0;

  virtual double inner(const Mat& x, const Mat& u, const Mat& v) const = 0;
  double norm(const Mat& x, const Mat& u) const;

  /// Riemannian (geodesic) distance.
  virtual double distance(const Mat& x, const Mat& y) const = 0;

  virtual Mat exp_map(const Mat& x, const Mat& v) const = 0;
  /// Throws cut_locus when y is (numerically) in the cut locus of x.
  virtual Mat log_map(const Mat& x, const Mat& y) const = 0;

  /// Orthogonal projection of an ambient matrix onto T_x.
  virtual Mat project(const Mat& x, const Mat& g) const = 0;
  /// Riemannian gradient from the Euclidean (ambient) gradient.
  virtual Mat egrad_to_rgrad(const Mat& x, const Mat& g) const = 0;

  /// Update rule used by the optimizers; exact exponential unless overridden.
  virtual Mat retract(const Mat& x, const Mat& v) const { return exp_map(x, v); }
  /// Moves a tangent vector at x to T_y. Projection-based by default.
  virtual Mat transport(const Mat& /*x*/, const Mat& y, const Mat& v) const {
    return project(y, v);
  }

  /// Orthonormal basis of T_x under the Riemannian inner product.
  virtual std::vector<Mat> tangent_basis(const Mat& x) const = 0;

  /// Throws invalid_input when x violates the manifold constraints by more
  /// than tol.
  virtual void check_point(const Mat& x, double tol = 1e-8) const = 0;
  virtual void check_tangent(const Mat& x, const Mat& v,
                             double tol = 1e-8) const = 0;
  /// Pulls a slightly drifted point back onto the manifold.
  virtual Mat repair(const Mat& x) const = 0;

  /// Metric seen by the losses. Equals distance^2 except for the Stein
  /// manifold, where it is the symmetric Stein divergence.
  virtual double model_sqdist(const Mat& x, const Mat& y) const;
  double model_distance(const Mat& x, const Mat& y) const;

  /// Returns model_sqdist(x, y) and writes its Riemannian gradients with
  /// respect to x and y. For the geodesic distance these are -2 log_x(y) and
  /// -2 log_y(x); gradients vanish where that expression is undefined.
  virtual double model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                                   Mat& grad_y) const;

  /// Uniform sample from the tangent ball of given radius at x.
  Mat random_tangent(const Mat& x, double radius, std::mt19937_64& rng) const;
  /// Uniform direction (unit Riemannian norm) in T_x.
  Mat random_direction(const Mat& x, std::mt19937_64& rng) const;

  Mat zero_tangent() const { return Mat::Zero(rows(), cols()); }
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Parses "euclidean:3", "sphere:2", "lorentz:3", "spd:2", "stein:2",
/// "grassmann:2,4", "so:3", "product:(lorentz:3)x(sphere:3)".
ManifoldPtr parse_manifold(std::string_view spec);

ManifoldPtr make_euclidean(int n);
ManifoldPtr make_sphere(int n);
ManifoldPtr make_lorentz(int n);
ManifoldPtr make_spd(int n);
ManifoldPtr make_stein(int n);
ManifoldPtr make_grassmann(int k, int n);
ManifoldPtr make_special_orthogonal(int n);
ManifoldPtr make_product(std::vector<ManifoldPtr> factors);

/// Minkowski product -x0 y0 + sum_i xi yi.
double lorentz_inner(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y);

/// Symmetric Stein divergence log det((a+b)/2) - log det(ab) / 2, with the
/// log-determinants read off Cholesky factors.
double stein_divergence(const Mat& a, const Mat& b);
/// Euclidean gradient of stein_divergence with respect to a:
/// (a + b)^-1 - a^-1 / 2.
Mat stein_gradient(const Mat& a, const Mat& b);

/// Bi-invariant distance on SO(n), n in {2, 3}: sqrt(2) times the relative
/// rotation angle.
double so_distance(const Mat& r1, const Mat& r2);

}  // namespace matman
