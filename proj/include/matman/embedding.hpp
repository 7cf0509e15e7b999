#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matman/manifold.hpp"

namespace matman {

/// m points on one manifold plus the distance scale s = exp(log_scale).
struct EmbeddingSet {
  ManifoldPtr manifold;
  std::vector<Mat> points;
  double log_scale = 0.0;

  int m() const { return static_cast<int>(points.size()); }
  double scale() const { return std::exp(log_scale); }
  /// s * model_distance(y_i, y_j).
  double distance(int i, int j) const;
  /// Dense matrix of scaled model distances.
  Eigen::MatrixXd distance_matrix() const;
};

/// Points exp_base(v) with v uniform in the tangent ball of `radius` at the
/// manifold's base point.
EmbeddingSet init_embedding(ManifoldPtr manifold, int m, std::uint64_t seed,
                            double radius = 0.1);

/// "MMEMB", u32 spec length + spec, u64 m, f64 scale, then every point as
/// little-endian f64 in column-major order.
void save_checkpoint(const std::string& path, const EmbeddingSet& y);
EmbeddingSet load_checkpoint(const std::string& path);

}  // namespace matman
