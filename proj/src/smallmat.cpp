#include "matman/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "matman/error.hpp"

namespace matman::smallmat {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr double kDegenerateScale = 1e-12;
// Relative eigenvalue gap below which 3x3 null-space extraction is abandoned.
constexpr double kTieGap = 1e-6;

EigenDecomposition sorted(const Vector& values, const Matrix& vectors) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return values(i) > values(j); });
  EigenDecomposition out{Vector(n), Matrix(vectors.rows(), n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = values(order[k]);
    out.vectors.col(k) = vectors.col(order[k]);
  }
  return out;
}

Eigen::Vector3d null_vector(const Eigen::Matrix3d& m, double scale2,
                            bool& ok) {
  const Eigen::Vector3d r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
  const Eigen::Vector3d c[3] = {r0.cross(r1), r0.cross(r2), r1.cross(r2)};
  int best = 0;
  double best_norm = c[0].squaredNorm();
  for (int i = 1; i < 3; ++i) {
    const double n = c[i].squaredNorm();
    if (n > best_norm) {
      best_norm = n;
      best = i;
    }
  }
  ok = best_norm > 1e-24 * scale2 && best_norm > 0.0;
  return ok ? Eigen::Vector3d(c[best] / std::sqrt(best_norm))
            : Eigen::Vector3d::Zero();
}

}  // namespace

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    fail(ErrorCode::invalid_input, "expected a non-empty square matrix");
  }
  if (!a.allFinite()) fail(ErrorCode::invalid_input, "matrix has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorCode::invalid_input, "matrix is not symmetric");
  }
}

Eigen::Vector2d eigvals_2x2(const Eigen::Matrix2d& a) {
  // t/2 +- sqrt((t/2)^2 - det); the radicand is rewritten as
  // ((a00 - a11)/2)^2 + a01^2, which is the same quantity without cancellation.
  const double half_trace = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const double r = std::hypot(half_diff, a(0, 1));
  return {half_trace + r, half_trace - r};
}

void eig_2x2(const Eigen::Matrix2d& a, Eigen::Vector2d& values,
             Eigen::Matrix2d& vectors) {
  values = eigvals_2x2(a);
  const double phi = 0.5 * std::atan2(2.0 * a(0, 1), a(0, 0) - a(1, 1));
  const double c = std::cos(phi), s = std::sin(phi);
  vectors << c, -s, s, c;
}

Eigen::Vector3d eigvals_3x3(const Eigen::Matrix3d& a) {
  // a = p * b + q * I with tr(b) = 0 and tr(b^2) = 6; the eigenvalues of b
  // are 2 cos(acos(det(b) / 2) / 3 + 2 k pi / 3).
  const double q = a.trace() / 3.0;
  const Eigen::Matrix3d shifted = a - q * Eigen::Matrix3d::Identity();
  const double p = std::sqrt(shifted.squaredNorm() / 6.0);
  if (p < kDegenerateScale * std::max(1.0, std::abs(q))) {
    return Eigen::Vector3d::Constant(q);
  }
  const Eigen::Matrix3d b = shifted / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  constexpr double kThird = 2.0 * std::numbers::pi / 3.0;
  const double l0 = q + 2.0 * p * std::cos(phi);
  const double l2 = q + 2.0 * p * std::cos(phi + kThird);
  const double l1 = 3.0 * q - l0 - l2;
  return {l0, l1, l2};
}

bool eig_3x3(const Eigen::Matrix3d& a, Eigen::Vector3d& values,
             Eigen::Matrix3d& vectors) {
  values = eigvals_3x3(a);
  const double scale = std::max({std::abs(values(0)), std::abs(values(2)),
                                 a.cwiseAbs().maxCoeff()});
  if (values(0) == values(2)) {
    // Scalar matrix (degenerate guard hit).
    vectors.setIdentity();
    return true;
  }
  const double gap = std::min(values(0) - values(1), values(1) - values(2));
  if (gap <= kTieGap * scale) return false;
  const double scale2 = scale * scale * scale * scale;
  bool ok0 = false, ok2 = false;
  const Eigen::Vector3d v0 =
      null_vector(a - values(0) * Eigen::Matrix3d::Identity(), scale2, ok0);
  Eigen::Vector3d v2 =
      null_vector(a - values(2) * Eigen::Matrix3d::Identity(), scale2, ok2);
  if (!ok0 || !ok2) return false;
  v2 -= v0.dot(v2) * v0;
  const double n2 = v2.norm();
  if (n2 < 0.5) return false;
  v2 /= n2;
  vectors.col(0) = v0;
  vectors.col(1) = v2.cross(v0);
  vectors.col(2) = v2;
  return true;
}

EigenDecomposition jacobi_eig(const Matrix& a_in, int max_sweeps) {
  require_symmetric(a_in);
  const Eigen::Index n = a_in.rows();
  Matrix a = 0.5 * (a_in + a_in.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double fro = a.norm();
  if (fro == 0.0) return {Vector::Zero(n), v};

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off2 += 2.0 * a(p, q) * a(p, q);
    const double off = std::sqrt(off2);
    if (off < kJacobiTol * fro) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = a(k, p), y = a(k, q);
          a(k, p) = c * x - s * y;
          a(k, q) = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = a(p, k), y = a(q, k);
          a(p, k) = c * x - s * y;
          a(q, k) = s * x + c * y;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = v(k, p), y = v(k, q);
          v(k, p) = c * x - s * y;
          v(k, q) = s * x + c * y;
        }
      }
    }
  }
  return sorted(a.diagonal(), v);
}

EigenDecomposition sym_eig(const Matrix& a) {
  require_symmetric(a);
  switch (a.rows()) {
    case 1:
      return {a.diagonal(), Matrix::Identity(1, 1)};
    case 2: {
      Eigen::Vector2d values;
      Eigen::Matrix2d vectors;
      eig_2x2(a, values, vectors);
      return {values, vectors};
    }
    case 3: {
      Eigen::Vector3d values;
      Eigen::Matrix3d vectors;
      if (eig_3x3(a, values, vectors)) return {values, vectors};
      return jacobi_eig(a);
    }
    default:
      return jacobi_eig(a);
  }
}

Vector sym_eigvals(const Matrix& a) {
  require_symmetric(a);
  switch (a.rows()) {
    case 1: return a.diagonal();
    case 2: return eigvals_2x2(a);
    case 3: return eigvals_3x3(a);
    default: return jacobi_eig(a).values;
  }
}

SvdDecomposition svd_2x2(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double s1_sum = a * a + b * b + c * c + d * d;
  const double s2_sum =
      std::hypot(a * a + b * b - c * c - d * d, 2.0 * (a * c + b * d));
  const double sigma1 = std::sqrt(0.5 * (s1_sum + s2_sum));
  // sigma1 * sigma2 = |det|; cheaper and better conditioned than
  // sqrt((S1 - S2) / 2) when sigma2 << sigma1.
  const double sigma2 = sigma1 > 0.0 ? std::abs(a * d - b * c) / sigma1 : 0.0;

  // Right singular vectors diagonalize m^T m.
  const double phi =
      0.5 * std::atan2(2.0 * (a * b + c * d), a * a + c * c - b * b - d * d);
  const double cp = std::cos(phi), sp = std::sin(phi);
  Eigen::Matrix2d v;
  v << cp, -sp, sp, cp;

  Eigen::Vector2d u1(1.0, 0.0);
  if (sigma1 > 0.0) u1 = m * v.col(0) / sigma1;
  u1.normalize();
  Eigen::Vector2d u2(-u1(1), u1(0));
  if (u2.dot(m * v.col(1)) < 0.0) u2 = -u2;

  SvdDecomposition out{Matrix(2, 2), Vector(2), v};
  out.left.col(0) = u1;
  out.left.col(1) = u2;
  out.singular_values << sigma1, sigma2;
  return out;
}

SvdDecomposition svd(const Matrix& a) {
  if (a.rows() == 2 && a.cols() == 2) return svd_2x2(a);
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Matrix cholesky(const Matrix& a) {
  require_symmetric(a);
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      fail(ErrorCode::not_positive_definite,
           "cholesky: non-positive pivot at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double apply_scalar(SpdFunction f, double x) {
  switch (f) {
    case SpdFunction::exp: return std::exp(x);
    case SpdFunction::log: return std::log(x);
    case SpdFunction::sqrt: return std::sqrt(x);
    case SpdFunction::inv_sqrt: return 1.0 / std::sqrt(x);
  }
  return x;
}

Matrix apply_fn(const EigenDecomposition& eig, SpdFunction f) {
  if (f != SpdFunction::exp) {
    const double top = std::max(1.0, std::abs(eig.values(0)));
    if (eig.values.minCoeff() <= 1e-15 * top) {
      fail(ErrorCode::singular,
           "spd_fn: eigenvalue too close to zero for log/sqrt");
    }
  }
  Vector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    mapped(i) = apply_scalar(f, eig.values(i));
  }
  Matrix out = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix spd_fn(const Matrix& a, SpdFunction f) {
  return apply_fn(sym_eig(a), f);
}

}  // namespace matman::smallmat
