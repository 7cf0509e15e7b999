#pragma once

#include <cstdint>
#include <vector>

#include "matman/graph.hpp"

namespace matman {

struct DeltaResult {
  std::vector<double> samples;
  double max = 0.0;
  double mean = 0.0;
};

/// Four-point delta: for each quadruple the pairing sums S1 >= S2 >= S3 give
/// (S1 - S2) / 2. Exhaustive over all quadruples when `exhaustive` is set
/// or m <= 60, otherwise n_quadruples random ones.
DeltaResult delta_hyperbolicity(const DistanceMatrix& d, long long n_quadruples, std::uint64_t seed,
                                bool exhaustive = false);
double four_point_delta(const DistanceMatrix& d, int a, int b, int c, int e);

/// 1 - W1(m_u, m_v) / d(u, v) with the lazy walk m_x = alpha * delta_x +
/// (1 - alpha) * uniform(N(x)). Costs come from d.
double ollivier_ricci_edge(const Graph& g, const DistanceMatrix& d, int u, int v, double alpha);

struct RicciResult {
  std::vector<Edge> edges;     // weight field unused
  std::vector<double> edge_curvature;
  std::vector<double> node_curvature;  // mean over incident edges
};

RicciResult ollivier_ricci(const Graph& g, const DistanceMatrix& d, double alpha);

/// k(m; y, z) averaged over x != m, from the deviation
/// d(x,m)^2 + d(y,z)^2 / 4 - (d(x,y)^2 + d(x,z)^2) / 2 divided by 2 d(x,m).
/// y and z must be distinct neighbours of m.
double graph_sectional(const Graph& g, const DistanceMatrix& d, int m_node, int y, int z);

/// Up to n_samples values of graph_sectional at random (m; y, z) with y, z
/// neighbours of m; all such triples when there are fewer.
std::vector<double> graph_sectional_samples(const Graph& g, const DistanceMatrix& d, long long n_samples,
                                            std::uint64_t seed);

}  // namespace matman
