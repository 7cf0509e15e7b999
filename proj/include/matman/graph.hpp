#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace matman {

struct Edge {
  int u;
  int v;
  double weight = 1.0;
};

/// Undirected simple graph with sorted adjacency lists.
struct Graph {
  int m = 0;
  std::vector<std::vector<int>> adjacency;
  std::vector<std::vector<double>> weights;  // parallel to adjacency
  bool weighted = false;
  std::vector<std::string> labels;           // original node names
  int dropped_nodes = 0;                     // removed outside the largest component

  std::size_t edge_count() const;
  /// Each undirected edge once, with u < v.
  std::vector<Edge> edges() const;
  bool has_edge(int u, int v) const;
  int degree(int u) const { return static_cast<int>(adjacency[static_cast<std::size_t>(u)].size()); }
};

/// Builds a graph on nodes 0..m-1. Duplicate edges are merged (keeping the
/// smallest weight); self-loops are rejected.
Graph make_graph(int m, const std::vector<Edge>& edges);

/// Parses "u v [w]" lines; '#' and '%' start comments. Nodes are relabelled
/// in first-appearance order and only the largest connected component is kept.
Graph parse_edgelist(std::istream& in);
Graph load_edgelist(const std::string& path);

bool is_connected(const Graph& g);
/// Largest connected component (ties: the one containing the lowest node id),
/// relabelled preserving relative order.
Graph largest_component(const Graph& g);

/// Dense symmetric distance matrix; `scale` is the divisor applied by
/// max_scale (1 for unscaled matrices).
struct DistanceMatrix {
  Eigen::MatrixXd values;
  double scale = 1.0;

  int m() const { return static_cast<int>(values.rows()); }
  double operator()(int i, int j) const { return values(i, j); }
};

/// BFS per source for unweighted graphs, Dijkstra otherwise. Throws
/// `disconnected` when some pair is unreachable.
DistanceMatrix apsp(const Graph& g);

/// Divides by the maximum entry; the divisor is accumulated into `scale`.
DistanceMatrix max_scale(DistanceMatrix d);

/// hop(u, v) = number of edges on a shortest path, for unweighted graphs.
struct HopLayers {
  int m = 0;
  int diameter = 0;
  std::vector<int> hop;  // row-major m x m

  int operator()(int u, int v) const {
    return hop[static_cast<std::size_t>(u) * static_cast<std::size_t>(m) + static_cast<std::size_t>(v)];
  }
  /// Nodes exactly k hops from u, ascending.
  std::vector<int> layer(int u, int k) const;
};

HopLayers hop_layers(const Graph& g);

/// Binary cache: "MMDM", version u32, m u64, scale f64, then m*m f32.
void save_distance_cache(const std::string& path, const DistanceMatrix& d);
DistanceMatrix load_distance_cache(const std::string& path);

/// Whitespace-separated square matrix of dissimilarities (one row per line).
/// Asymmetric input is symmetrised by averaging; the diagonal is zeroed.
DistanceMatrix load_dissimilarity(const std::string& path);

/// Recovers the unweighted graph whose max-scaled hop distances produced d:
/// an edge wherever d(u, v) * scale == 1. Returns false if d does not look
/// like a hop-distance matrix.
bool graph_from_distances(const DistanceMatrix& d, Graph& out);

}  // namespace matman
