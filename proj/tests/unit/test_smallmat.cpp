#include <gtest/gtest.h>

#include "matman/error.hpp"
#include "matman/smallmat.hpp"
#include "oracles.hpp"

namespace sm = matman::smallmat;
using oracle::Mat;

TEST(SmallMat, Eigvals2x2MatchJacobi) {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 500; ++c) {
    const Eigen::Matrix2d a = oracle::random_symmetric(2, rng);
    const auto ref = oracle::jacobi_eigenvalues(a);
    const Eigen::Vector2d got = sm::eigvals_2x2(a);
    EXPECT_NEAR(got(0), ref(0), 1e-12);
    EXPECT_NEAR(got(1), ref(1), 1e-12);
  }
}

TEST(SmallMat, Eig2x2VectorsReconstruct) {
  std::mt19937_64 rng(12);
  for (int c = 0; c < 200; ++c) {
    const Eigen::Matrix2d a = oracle::random_symmetric(2, rng);
    Eigen::Vector2d w;
    Eigen::Matrix2d v;
    sm::eig_2x2(a, w, v);
    EXPECT_LT((v * w.asDiagonal() * v.transpose() - a).norm(), 1e-12);
    EXPECT_LT((v.transpose() * v - Eigen::Matrix2d::Identity()).norm(), 1e-12);
  }
}

TEST(SmallMat, Eigvals3x3MatchJacobi) {
  std::mt19937_64 rng(13);
  for (int c = 0; c < 500; ++c) {
    const Eigen::Matrix3d a = oracle::random_symmetric(3, rng);
    const auto ref = oracle::jacobi_eigenvalues(a);
    const Eigen::Vector3d got = sm::eigvals_3x3(a);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got(i), ref(i), 1e-10);
  }
}

TEST(SmallMat, Eig3x3ReconstructsOrDeclines) {
  std::mt19937_64 rng(14);
  for (int c = 0; c < 300; ++c) {
    const Eigen::Matrix3d a = oracle::random_symmetric(3, rng);
    Eigen::Vector3d w;
    Eigen::Matrix3d v;
    if (sm::eig_3x3(a, w, v)) {
      EXPECT_LT((v * w.asDiagonal() * v.transpose() - a).norm(), 1e-9);
      EXPECT_LT((v.transpose() * v - Eigen::Matrix3d::Identity()).norm(), 1e-9);
    }
  }
}

TEST(SmallMat, RepeatedEigenvaluesFallBack) {
  // diag(2, 2, 5) rotated: the closed form must either succeed or decline,
  // and sym_eig must always produce a valid decomposition.
  std::mt19937_64 rng(15);
  Eigen::HouseholderQR<Mat> qr(oracle::random_matrix(3, 3, rng));
  const Mat q = qr.householderQ();
  const Mat a = q * Eigen::Vector3d(2, 2, 5).asDiagonal() * q.transpose();
  const auto e = sm::sym_eig(a);
  EXPECT_NEAR(e.values(0), 5.0, 1e-12);
  EXPECT_NEAR(e.values(1), 2.0, 1e-12);
  EXPECT_NEAR(e.values(2), 2.0, 1e-12);
  EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm(), 1e-12);
  const auto iso = sm::sym_eig(3.0 * Mat::Identity(3, 3));
  EXPECT_LT((iso.values - Eigen::Vector3d::Constant(3.0)).norm(), 1e-15);
}

TEST(SmallMat, JacobiLargerSizes) {
  std::mt19937_64 rng(16);
  for (int n : {4, 5, 8}) {
    const Mat a = oracle::random_symmetric(n, rng);
    const auto e = sm::jacobi_eig(a);
    const auto ref = oracle::jacobi_eigenvalues(a);
    EXPECT_LT((e.values - ref).norm(), 1e-10);
    EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm(), 1e-10);
  }
}

TEST(SmallMat, Svd2x2MatchesHestenes) {
  std::mt19937_64 rng(17);
  for (int c = 0; c < 500; ++c) {
    const Eigen::Matrix2d a = oracle::random_matrix(2, 2, rng);
    const auto s = sm::svd_2x2(a);
    const auto ref = oracle::hestenes_singular_values(a);
    EXPECT_NEAR(s.singular_values(0), ref(0), 1e-12);
    EXPECT_NEAR(s.singular_values(1), ref(1), 1e-12);
    EXPECT_LT((s.left * s.singular_values.asDiagonal() * s.right.transpose() - a).norm(), 1e-12);
  }
}

TEST(SmallMat, Svd2x2EdgeCases) {
  for (const Eigen::Matrix2d& a : {Eigen::Matrix2d(Eigen::Matrix2d::Zero()),
                                   Eigen::Matrix2d((Eigen::Matrix2d() << 1, 0, 0, 0).finished()),
                                   Eigen::Matrix2d((Eigen::Matrix2d() << 0, 2, 0, 0).finished()),
                                   Eigen::Matrix2d((Eigen::Matrix2d() << 3, 0, 0, -3).finished())}) {
    const auto s = sm::svd_2x2(a);
    EXPECT_GE(s.singular_values(1), 0.0);
    EXPECT_GE(s.singular_values(0), s.singular_values(1));
    EXPECT_LT((s.left * s.singular_values.asDiagonal() * s.right.transpose() - a).norm(), 1e-14);
  }
}

TEST(SmallMat, GeneralSvdThin) {
  std::mt19937_64 rng(18);
  const Mat a = oracle::random_matrix(5, 3, rng);
  const auto s = sm::svd(a);
  EXPECT_EQ(s.left.cols(), 3);
  EXPECT_LT((s.left * s.singular_values.asDiagonal() * s.right.transpose() - a).norm(), 1e-12);
  EXPECT_LT((s.singular_values - oracle::hestenes_singular_values(a)).norm(), 1e-12);
}

TEST(SmallMat, CholeskyAndFailure) {
  std::mt19937_64 rng(19);
  const Mat a = oracle::random_spd(4, rng);
  const Mat l = sm::cholesky(a);
  EXPECT_LT((l * l.transpose() - a).norm(), 1e-12);
  EXPECT_EQ(l(0, 1), 0.0);
  Mat bad = Mat::Identity(2, 2);
  bad(1, 1) = -1.0;
  try {
    sm::cholesky(bad);
    FAIL() << "expected not_positive_definite";
  } catch (const matman::Error& e) {
    EXPECT_EQ(e.code(), matman::ErrorCode::not_positive_definite);
  }
}

TEST(SmallMat, SpdFunctionsAreConsistent) {
  std::mt19937_64 rng(20);
  for (int n : {2, 3, 5}) {
    const Mat a = oracle::random_spd(n, rng);
    const Mat r = sm::spd_fn(a, sm::SpdFunction::sqrt);
    EXPECT_LT((r * r - a).norm(), 1e-11);
    const Mat ir = sm::spd_fn(a, sm::SpdFunction::inv_sqrt);
    EXPECT_LT((ir * a * ir - Mat::Identity(n, n)).norm(), 1e-11);
    const Mat lg = sm::spd_fn(a, sm::SpdFunction::log);
    EXPECT_LT((sm::spd_fn(lg, sm::SpdFunction::exp) - a).norm(), 1e-11);
  }
}

TEST(SmallMat, SameSpectrumLemma) {
  // A^-1 B and L^-1 B L^-T (A = L L^T) are similar, so share eigenvalues.
  std::mt19937_64 rng(21);
  for (int n : {2, 3}) {
    for (int c = 0; c < 100; ++c) {
      const Mat a = oracle::random_spd(n, rng), b = oracle::random_spd(n, rng);
      const Mat l = sm::cholesky(a);
      const Mat li = l.inverse();
      const Mat w = li * b * li.transpose();
      const auto lhs = sm::sym_eigvals(0.5 * (w + w.transpose()));
      Eigen::EigenSolver<Mat> es(a.inverse() * b);
      Eigen::VectorXd rhs = es.eigenvalues().real();
      std::sort(rhs.data(), rhs.data() + n, std::greater<double>());
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(SmallMat, RequireSymmetric) {
  Mat a = Mat::Identity(2, 2);
  a(0, 1) = 1e-3;
  EXPECT_THROW(sm::require_symmetric(a), matman::Error);
  a(1, 0) = 1e-3;
  EXPECT_NO_THROW(sm::require_symmetric(a));
}
