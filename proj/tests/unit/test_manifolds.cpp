#include <gtest/gtest.h>

#include <numbers>

#include "geometry_suite.hpp"
#include "matman/error.hpp"
#include "matman/manifold.hpp"
#include "oracles.hpp"

using matman::Mat;
using matman::ManifoldPtr;

namespace {

const char* kSpecs[] = {"euclidean:3", "sphere:2",       "lorentz:3", "spd:2",
                        "spd:3",       "stein:2",        "stein:3",   "grassmann:1,3",
                        "grassmann:2,4", "so:3",         "so:2",      "product:(lorentz:2)x(sphere:2)"};

matman::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const matman::Error& e) {
    return e.code();
  }
  return static_cast<matman::ErrorCode>(0);
}

}  // namespace

class GeometrySuite : public ::testing::TestWithParam<const char*> {};

TEST_P(GeometrySuite, PropertiesHold) {
  const auto man = matman::parse_manifold(GetParam());
  std::string detail;
  const auto report = suite::run_geometry(*man, 150, 1234);
  EXPECT_TRUE(suite::passes(report, &detail)) << GetParam() << ": " << detail;
}

TEST_P(GeometrySuite, BasisIsOrthonormal) {
  const auto man = matman::parse_manifold(GetParam());
  std::mt19937_64 rng(5);
  const Mat x = man->exp_map(man->base_point(), man->random_tangent(man->base_point(), 1.0, rng));
  const auto basis = man->tangent_basis(x);
  ASSERT_EQ(static_cast<int>(basis.size()), man->dim());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    EXPECT_NO_THROW(man->check_tangent(x, basis[i], 1e-8));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      EXPECT_NEAR(man->inner(x, basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST_P(GeometrySuite, RetractTransportRepairStayOnManifold) {
  const auto man = matman::parse_manifold(GetParam());
  std::mt19937_64 rng(6);
  for (int c = 0; c < 20; ++c) {
    const Mat x = man->exp_map(man->base_point(), man->random_tangent(man->base_point(), 1.0, rng));
    EXPECT_NO_THROW(man->check_point(x, 1e-9));
    const Mat v = man->random_tangent(x, 0.5, rng);
    const Mat y = man->retract(x, v);
    EXPECT_NO_THROW(man->check_point(y, 1e-9));
    const Mat w = man->transport(x, y, man->random_tangent(x, 1.0, rng));
    EXPECT_NO_THROW(man->check_tangent(y, w, 1e-8));
    EXPECT_LT(man->distance(man->repair(y), y), 1e-9);
    const Mat p = man->project(x, oracle::random_matrix(static_cast<int>(man->rows()),
                                                        static_cast<int>(man->cols()), rng));
    EXPECT_NO_THROW(man->check_tangent(x, p, 1e-8));
    EXPECT_LT((man->project(x, p) - p).norm(), 1e-10);
  }
}

TEST_P(GeometrySuite, SpecRoundTrips) {
  const auto man = matman::parse_manifold(GetParam());
  EXPECT_EQ(matman::parse_manifold(man->spec())->spec(), man->spec());
  EXPECT_EQ(man->base_point().rows(), man->rows());
  EXPECT_EQ(man->base_point().cols(), man->cols());
}

INSTANTIATE_TEST_SUITE_P(AllSpecs, GeometrySuite, ::testing::ValuesIn(kSpecs));

TEST(Manifolds, ParseRejectsGarbage) {
  for (const char* bad : {"", "sphere", "sphere:0", "sphere:-1", "spd:0", "grassmann:3,3", "grassmann:2",
                          "so:4", "product:(sphere:2)", "product:(sphere:2)x", "torus:2", "sphere:2x",
                          "lorentz:abc", "euclidean:3x"}) {
    EXPECT_EQ(code_of([&] { matman::parse_manifold(bad); }), matman::ErrorCode::invalid_input) << bad;
  }
  EXPECT_EQ(matman::parse_manifold("hyperbolic:2")->kind(), matman::ManifoldKind::lorentz);
}

TEST(Manifolds, IntrinsicDimensions) {
  EXPECT_EQ(matman::parse_manifold("sphere:3")->rows(), 4);
  EXPECT_EQ(matman::parse_manifold("lorentz:3")->dim(), 3);
  EXPECT_EQ(matman::parse_manifold("spd:3")->dim(), 6);
  EXPECT_EQ(matman::parse_manifold("grassmann:2,5")->dim(), 6);
  EXPECT_EQ(matman::parse_manifold("so:3")->dim(), 3);
  EXPECT_EQ(matman::parse_manifold("product:(lorentz:2)x(sphere:2)x(spd:2)")->dim(), 7);
}

TEST(Manifolds, KnownDistances) {
  const auto sphere = matman::parse_manifold("sphere:2");
  EXPECT_NEAR(sphere->distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)), std::numbers::pi / 2,
              1e-14);

  const auto lor = matman::parse_manifold("lorentz:2");
  const double t = 2.5;
  EXPECT_NEAR(lor->distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(std::cosh(t), std::sinh(t), 0)), t,
              1e-12);
  // Far apart points (cosh of 30 is about 5e12).
  EXPECT_NEAR(lor->distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(std::cosh(30.0), 0, std::sinh(30.0))),
              30.0, 1e-9);

  const auto spd = matman::parse_manifold("spd:2");
  const Mat d = Eigen::Vector2d(std::exp(1.0), std::exp(-1.0)).asDiagonal();
  EXPECT_NEAR(spd->distance(Mat::Identity(2, 2), d), std::sqrt(2.0), 1e-12);

  const auto gr = matman::parse_manifold("grassmann:1,3");
  const double ang = 0.7;
  EXPECT_NEAR(gr->distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(std::cos(ang), std::sin(ang), 0)), ang,
              1e-13);
  // Representatives: -x spans the same line.
  EXPECT_NEAR(gr->distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)), 0.0, 1e-13);

  const auto prod = matman::parse_manifold("product:(lorentz:2)x(sphere:2)");
  Eigen::VectorXd a(6), b(6);
  a << 1, 0, 0, 1, 0, 0;
  b << std::cosh(t), std::sinh(t), 0, 0, 1, 0;
  EXPECT_NEAR(prod->distance(a, b), std::hypot(t, std::numbers::pi / 2), 1e-12);
}

TEST(Manifolds, SpdAffineInvariance) {
  std::mt19937_64 rng(31);
  const auto spd = matman::parse_manifold("spd:3");
  for (int c = 0; c < 20; ++c) {
    const Mat a = oracle::random_spd(3, rng), b = oracle::random_spd(3, rng);
    const Mat p = oracle::random_matrix(3, 3, rng) + 3.0 * Mat::Identity(3, 3);
    EXPECT_NEAR(spd->distance(a, b), spd->distance(p * a * p.transpose(), p * b * p.transpose()), 1e-9);
  }
}

TEST(Manifolds, SteinDivergenceMatchesDeterminants) {
  std::mt19937_64 rng(32);
  for (int n : {2, 3, 4}) {
    for (int c = 0; c < 20; ++c) {
      const Mat a = oracle::random_spd(n, rng), b = oracle::random_spd(n, rng);
      const double ref =
          std::log((0.5 * (a + b)).determinant()) - 0.5 * std::log(a.determinant() * b.determinant());
      EXPECT_NEAR(matman::stein_divergence(a, b), ref, 1e-11);
      EXPECT_NEAR(matman::stein_divergence(a, a), 0.0, 1e-12);
      EXPECT_GE(matman::stein_divergence(a, b), 0.0);
    }
  }
  const auto st = matman::parse_manifold("stein:2");
  const Mat a = oracle::random_spd(2, rng), b = oracle::random_spd(2, rng);
  EXPECT_NEAR(st->model_sqdist(a, b), matman::stein_divergence(a, b), 1e-14);
  EXPECT_NEAR(st->model_distance(a, b), std::sqrt(matman::stein_divergence(a, b)), 1e-14);
}

TEST(Manifolds, SteinGradientFiniteDifferences) {
  std::mt19937_64 rng(33);
  for (int n : {2, 3}) {
    for (int c = 0; c < 30; ++c) {
      const Mat a = oracle::random_spd(n, rng), b = oracle::random_spd(n, rng);
      const Mat g = matman::stein_gradient(a, b);
      Mat fd(n, n);
      const double h = 1e-6;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Mat e = Mat::Zero(n, n);
          e(i, j) = 1.0;
          fd(i, j) = (matman::stein_divergence(a + h * e, b) - matman::stein_divergence(a - h * e, b)) / (2 * h);
        }
      }
      // The divergence is only defined on symmetric matrices; compare on the
      // symmetric part.
      const Mat fds = 0.5 * (fd + fd.transpose());
      EXPECT_LT((g - fds).norm() / std::max(1e-3, g.norm()), 1e-6);
    }
  }
  // At a = b the divergence is minimal, so the gradient vanishes.
  const Mat a = oracle::random_spd(3, rng);
  EXPECT_LT(matman::stein_gradient(a, a).norm(), 1e-12);
}

TEST(Manifolds, SoDistanceMatchesQuaternions) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> n01;
  for (int c = 0; c < 200; ++c) {
    Eigen::Vector4d q1, q2;
    for (int i = 0; i < 4; ++i) {
      q1(i) = n01(rng);
      q2(i) = n01(rng);
    }
    q1.normalize();
    q2.normalize();
    const double theta = 2.0 * std::acos(std::min(1.0, std::abs(q1.dot(q2))));
    const Mat r1 = oracle::quat_to_rotation(q1), r2 = oracle::quat_to_rotation(q2);
    if (theta > std::numbers::pi - 1e-6) continue;
    EXPECT_NEAR(matman::so_distance(r1, r2), std::sqrt(2.0) * theta, 1e-8);
  }
  EXPECT_THROW(matman::so_distance(Mat::Identity(3, 3), 2.0 * Mat::Identity(3, 3)), matman::Error);
}

TEST(Manifolds, CutLocusIsReported) {
  const auto sphere = matman::parse_manifold("sphere:2");
  EXPECT_EQ(code_of([&] { sphere->log_map(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)); }),
            matman::ErrorCode::cut_locus);
  const auto gr = matman::parse_manifold("grassmann:1,3");
  EXPECT_EQ(code_of([&] { gr->log_map(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)); }),
            matman::ErrorCode::cut_locus);
  const auto so = matman::parse_manifold("so:3");
  const Mat flip = Eigen::Vector3d(1, -1, -1).asDiagonal();
  EXPECT_EQ(code_of([&] { so->log_map(Mat::Identity(3, 3), flip); }), matman::ErrorCode::cut_locus);
}

TEST(Manifolds, CheckPointRejects) {
  const auto sphere = matman::parse_manifold("sphere:2");
  EXPECT_EQ(code_of([&] { sphere->check_point(Eigen::Vector3d(1, 1, 0)); }), matman::ErrorCode::invalid_input);
  const auto spd = matman::parse_manifold("spd:2");
  Mat bad = Mat::Identity(2, 2);
  bad(1, 1) = -1;
  EXPECT_NE(code_of([&] { spd->check_point(bad); }), static_cast<matman::ErrorCode>(0));
  const auto lor = matman::parse_manifold("lorentz:2");
  EXPECT_EQ(code_of([&] { lor->check_point(Eigen::Vector3d(-1, 0, 0)); }), matman::ErrorCode::invalid_input);
  // Repair pulls drifted points back.
  EXPECT_NO_THROW(sphere->check_point(sphere->repair(Eigen::Vector3d(1, 1e-3, 0))));
  EXPECT_NO_THROW(lor->check_point(lor->repair(Eigen::Vector3d(1.01, 0.1, 0))));
}

TEST(Manifolds, LorentzInner) {
  EXPECT_DOUBLE_EQ(matman::lorentz_inner(Eigen::Vector3d(2, 1, 1), Eigen::Vector3d(3, 1, 2)), -6 + 1 + 2);
}
