#include "matman/manifold.hpp"

#include <cmath>

#include "matman/error.hpp"

namespace matman {

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::lorentz: return "lorentz";
    case ManifoldKind::spd_canonical: return "spd";
    case ManifoldKind::spd_stein: return "stein";
    case ManifoldKind::grassmann: return "grassmann";
    case ManifoldKind::product: return "product";
    case ManifoldKind::special_orthogonal: return "so";
  }
  return "unknown";
}

double Manifold::norm(const Mat& x, const Mat& u) const {
  return std::sqrt(std::max(0.0, inner(x, u, u)));
}

double Manifold::model_sqdist(const Mat& x, const Mat& y) const {
  const double d = distance(x, y);
  return d * d;
}

double Manifold::model_distance(const Mat& x, const Mat& y) const {
  return std::sqrt(std::max(0.0, model_sqdist(x, y)));
}

double Manifold::model_sqdist_grad(const Mat& x, const Mat& y, Mat& grad_x,
                                   Mat& grad_y) const {
  const double d = distance(x, y);
  try {
    grad_x = -2.0 * log_map(x, y);
    grad_y = -2.0 * log_map(y, x);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::cut_locus) throw;
    grad_x = zero_tangent();
    grad_y = zero_tangent();
  }
  return d * d;
}

Mat Manifold::random_direction(const Mat& x, std::mt19937_64& rng) const {
  const auto basis = tangent_basis(x);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(basis.size()));
  double n2 = 0.0;
  while (n2 < 1e-24) {
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = normal(rng);
    n2 = coeffs.squaredNorm();
  }
  coeffs /= std::sqrt(n2);
  Mat v = zero_tangent();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    v += coeffs(static_cast<Eigen::Index>(i)) * basis[i];
  }
  return v;
}

Mat Manifold::random_tangent(const Mat& x, double radius,
                             std::mt19937_64& rng) const {
  Mat dir = random_direction(x, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::pow(unit(rng), 1.0 / dim());
  return r * dir;
}

double lorentz_inner(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  return x.tail(x.size() - 1).dot(y.tail(y.size() - 1)) - x(0) * y(0);
}

}  // namespace matman
