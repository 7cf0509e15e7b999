#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matman/embedding.hpp"
#include "matman/graph.hpp"

namespace matman {

/// values[k-1] = F1(k), counts[k-1] = number of (u, v) pairs with v on layer k.
struct F1Curve {
  std::vector<double> values;
  std::vector<long long> counts;
};

/// Ranking fidelity per hop layer. Both "closer than" sets contain the
/// source itself and use strict comparisons; model ties within a relative
/// 1e-12 are not "closer". An empty model set scores 0.
F1Curve f1_at_k(const Graph& g, const Eigen::MatrixXd& model_dist);
F1Curve f1_at_k(const Graph& g, const EmbeddingSet& y);

/// Layer-count-weighted mean of the curve.
double auc_f1(const F1Curve& curve);

/// For each node u and neighbour v: precision of the model ball around u
/// reaching v (ties included); averaged over neighbours, then nodes.
double mean_average_precision(const Graph& g, const Eigen::MatrixXd& model_dist);

/// Mean over pairs of |d_M - d_G| / d_G with both matrices max-scaled.
double average_distortion(const DistanceMatrix& d, const Eigen::MatrixXd& model_dist);

/// (sum of the three angles of the geodesic triangle - pi) / (2 pi).
/// Throws cut_locus/degenerate if some log map is undefined or zero.
double angle_sum(const Manifold& man, const Mat& x, const Mat& y, const Mat& z);

/// Normalised angle sums of random triangles of embedded points; triples
/// hitting a cut locus or a repeated point are redrawn.
std::vector<double> angle_sum_profile(const EmbeddingSet& y, int n_triples, std::uint64_t seed);

struct MetricsReport {
  bool has_graph = false;
  F1Curve f1;
  double auc = 0.0;
  double map = 0.0;
  double avg_distortion = 0.0;
  std::vector<double> angles;
};

/// graph may be null (dissimilarity input); ranking metrics are then absent.
MetricsReport evaluate(const Graph* graph, const DistanceMatrix& d, const EmbeddingSet& y,
                       int n_triples = 0, std::uint64_t seed = 0);

std::string report_json(const MetricsReport& r);
std::string f1_csv(const F1Curve& curve);

/// Histogram of samples over [lo, hi) with `bins` equal cells, as CSV
/// (bin_lo, bin_hi, count, density).
std::string histogram_csv(const std::vector<double>& samples, double lo, double hi, int bins);

}  // namespace matman
