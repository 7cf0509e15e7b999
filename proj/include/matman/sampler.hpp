#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matman/graph.hpp"
#include "matman/manifold.hpp"

namespace matman {

struct SampleCloud {
  ManifoldPtr manifold;
  std::vector<Mat> points;
};

/// Haar-distributed points on sphere, Grassmann or SO(n) via Gaussian
/// orthonormalisation. Each point has its own generator derived from
/// (seed, index).
SampleCloud sample_uniform(ManifoldPtr manifold, int count, std::uint64_t seed);

/// exp_base(v) with v uniform in the Riemannian tangent ball of `radius`.
SampleCloud sample_exp_ball(ManifoldPtr manifold, const Mat& base, double radius, int count,
                            std::uint64_t seed);

/// Pairwise geodesic distances of the cloud.
Eigen::MatrixXd cloud_distances(const SampleCloud& cloud);

/// Edge iff distance < tau.
Graph threshold_graph(const Eigen::MatrixXd& dist, double tau);

/// Linearly interpolated quantile of unsorted data (q in [0, 1]).
double quantile(std::vector<double> v, double q);

struct SweepRow {
  double threshold = 0.0;
  bool empty = false;  // no edges at this threshold
  double degree_q25 = 0.0, degree_q50 = 0.0, degree_q75 = 0.0;
  bool has_curvature = false;  // largest component had >= 100 nodes
  double curv_q25 = 0.0, curv_q50 = 0.0, curv_q75 = 0.0;
  int largest_component = 0;
};

std::vector<SweepRow> sweep(const Eigen::MatrixXd& dist, const std::vector<double>& thresholds,
                            long long sectional_samples = 2000, std::uint64_t seed = 0);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int n);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace matman
