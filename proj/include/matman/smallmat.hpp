#pragma once

// Dense kernels for the tiny matrices that show up as manifold points:
// symmetric eigendecomposition, 2x2 SVD, Cholesky and SPD matrix functions.
// The 2x2 and 3x3 eigenvalue problems use closed-form expressions; larger
// sizes (and near-degenerate 3x3 spectra) go through cyclic Jacobi.

#include <Eigen/Dense>

namespace matman::smallmat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues sorted descending, eigenvectors as orthonormal columns.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// Thin SVD, a = left * diag(singular_values) * right^T, values descending.
struct SvdDecomposition {
  Matrix left;
  Vector singular_values;
  Matrix right;
};

enum class SpdFunction { exp, log, sqrt, inv_sqrt };

EigenDecomposition sym_eig(const Matrix& a);
Vector sym_eigvals(const Matrix& a);

/// Iterative path. Stops when the off-diagonal Frobenius norm falls below
/// 1e-12 * ||a||_F or after max_sweeps sweeps.
EigenDecomposition jacobi_eig(const Matrix& a, int max_sweeps = 100);

Eigen::Vector2d eigvals_2x2(const Eigen::Matrix2d& a);
Eigen::Vector3d eigvals_3x3(const Eigen::Matrix3d& a);

void eig_2x2(const Eigen::Matrix2d& a, Eigen::Vector2d& values,
             Eigen::Matrix2d& vectors);

/// Closed-form 3x3 eigenpairs. Returns false (outputs unspecified) when two
/// eigenvalues are too close for null-space extraction to be reliable; the
/// caller is expected to fall back to jacobi_eig.
bool eig_3x3(const Eigen::Matrix3d& a, Eigen::Vector3d& values,
             Eigen::Matrix3d& vectors);

SvdDecomposition svd_2x2(const Eigen::Matrix2d& a);

/// Thin SVD of an arbitrary matrix; dispatches to svd_2x2 for 2x2 input.
SvdDecomposition svd(const Matrix& a);

/// Lower-triangular L with L * L^T = a. Throws not_positive_definite on a
/// non-positive pivot.
Matrix cholesky(const Matrix& a);

/// U * diag(f(lambda)) * U^T.
Matrix spd_fn(const Matrix& a, SpdFunction f);

/// Same as spd_fn but on an existing decomposition.
Matrix apply_fn(const EigenDecomposition& eig, SpdFunction f);

double apply_scalar(SpdFunction f, double x);

/// Throws invalid_input if |a_ij - a_ji| exceeds 1e-12 (scaled by max |a|).
void require_symmetric(const Matrix& a);

}  // namespace matman::smallmat
