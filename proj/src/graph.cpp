#include "matman/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "matman/error.hpp"
#include "matman/parallel.hpp"

namespace matman {

std::size_t Graph::edge_count() const {
  std::size_t s = 0;
  for (const auto& a : adjacency) s += a.size();
  return s / 2;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (int u = 0; u < m; ++u) {
    const auto& a = adjacency[static_cast<std::size_t>(u)];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] > u) out.push_back({u, a[k], weights[static_cast<std::size_t>(u)][k]});
    }
  }
  return out;
}

bool Graph::has_edge(int u, int v) const {
  const auto& a = adjacency[static_cast<std::size_t>(u)];
  return std::binary_search(a.begin(), a.end(), v);
}

Graph make_graph(int m, const std::vector<Edge>& edges) {
  if (m < 0) fail(ErrorCode::invalid_input, "graph: negative node count");
  std::vector<std::vector<std::pair<int, double>>> tmp(static_cast<std::size_t>(m));
  bool weighted = false;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= m || e.v >= m) {
      fail(ErrorCode::invalid_input, "graph: edge endpoint out of range");
    }
    if (e.u == e.v) fail(ErrorCode::invalid_input, "graph: self-loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      fail(ErrorCode::invalid_input, "graph: edge weight must be positive");
    }
    if (e.weight != 1.0) weighted = true;
    tmp[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.weight);
    tmp[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.weight);
  }
  Graph g;
  g.m = m;
  g.weighted = weighted;
  g.adjacency.resize(static_cast<std::size_t>(m));
  g.weights.resize(static_cast<std::size_t>(m));
  for (std::size_t u = 0; u < tmp.size(); ++u) {
    auto& t = tmp[u];
    std::sort(t.begin(), t.end());
    for (const auto& [v, w] : t) {
      if (!g.adjacency[u].empty() && g.adjacency[u].back() == v) continue;  // keeps min weight
      g.adjacency[u].push_back(v);
      g.weights[u].push_back(w);
    }
  }
  g.labels.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) g.labels[static_cast<std::size_t>(i)] = std::to_string(i);
  return g;
}

namespace {

std::vector<int> component_ids(const Graph& g, int& count) {
  std::vector<int> comp(static_cast<std::size_t>(g.m), -1);
  count = 0;
  std::vector<int> stack;
  for (int s = 0; s < g.m; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = count;
          stack.push_back(v);
        }
      }
    }
    ++count;
  }
  return comp;
}

}  // namespace

bool is_connected(const Graph& g) {
  int count = 0;
  component_ids(g, count);
  return count <= 1;
}

Graph largest_component(const Graph& g) {
  int count = 0;
  const auto comp = component_ids(g, count);
  if (count <= 1) return g;
  std::vector<int> sizes(static_cast<std::size_t>(count), 0);
  for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<int> relabel(static_cast<std::size_t>(g.m), -1);
  int next = 0;
  for (int u = 0; u < g.m; ++u) {
    if (comp[static_cast<std::size_t>(u)] == best) relabel[static_cast<std::size_t>(u)] = next++;
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (comp[static_cast<std::size_t>(e.u)] == best) {
      edges.push_back({relabel[static_cast<std::size_t>(e.u)], relabel[static_cast<std::size_t>(e.v)], e.weight});
    }
  }
  Graph out = make_graph(next, edges);
  out.weighted = g.weighted;
  for (int u = 0; u < g.m; ++u) {
    const int r = relabel[static_cast<std::size_t>(u)];
    if (r >= 0 && u < static_cast<int>(g.labels.size())) {
      out.labels[static_cast<std::size_t>(r)] = g.labels[static_cast<std::size_t>(u)];
    }
  }
  out.dropped_nodes = g.dropped_nodes + (g.m - next);
  return out;
}

Graph parse_edgelist(std::istream& in) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto id_of = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<int>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#%");
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    std::string a, b, w;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) {
      fail(ErrorCode::invalid_input, "edge list line " + std::to_string(lineno) + ": expected 'u v [w]'");
    }
    double weight = 1.0;
    if (ls >> w) {
      try {
        std::size_t used = 0;
        weight = std::stod(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
      } catch (const std::exception&) {
        fail(ErrorCode::invalid_input, "edge list line " + std::to_string(lineno) + ": bad weight '" + w + "'");
      }
      if (!(weight > 0.0)) {
        fail(ErrorCode::invalid_input, "edge list line " + std::to_string(lineno) + ": nonpositive weight");
      }
    }
    const int u = id_of(a), v = id_of(b);
    if (u == v) {
      spdlog::debug("edge list line {}: self-loop ignored", lineno);
      continue;
    }
    edges.push_back({u, v, weight});
  }
  if (edges.empty()) fail(ErrorCode::invalid_input, "edge list is empty");
  Graph g = make_graph(static_cast<int>(labels.size()), edges);
  g.labels = std::move(labels);
  if (!is_connected(g)) {
    Graph big = largest_component(g);
    spdlog::warn("input graph is disconnected: kept {} of {} nodes ({} dropped)", big.m, g.m,
                 big.dropped_nodes);
    return big;
  }
  return g;
}

Graph load_edgelist(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open edge list '" + path + "'");
  try {
    return parse_edgelist(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

DistanceMatrix apsp(const Graph& g) {
  const int m = g.m;
  DistanceMatrix out;
  out.values.setZero(m, m);
  constexpr double inf = std::numeric_limits<double>::infinity();
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
    std::vector<double> dist(static_cast<std::size_t>(m), inf);
    dist[s] = 0.0;
    if (!g.weighted) {
      std::vector<int> queue{static_cast<int>(s)};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
          if (dist[static_cast<std::size_t>(v)] == inf) {
            dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1.0;
            queue.push_back(v);
          }
        }
      }
    } else {
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      pq.emplace(0.0, static_cast<int>(s));
      while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        const auto& adj = g.adjacency[static_cast<std::size_t>(u)];
        const auto& w = g.weights[static_cast<std::size_t>(u)];
        for (std::size_t k = 0; k < adj.size(); ++k) {
          const double nd = d + w[k];
          if (nd < dist[static_cast<std::size_t>(adj[k])]) {
            dist[static_cast<std::size_t>(adj[k])] = nd;
            pq.emplace(nd, adj[k]);
          }
        }
      }
    }
    for (int v = 0; v < m; ++v) out.values(static_cast<Eigen::Index>(s), v) = dist[static_cast<std::size_t>(v)];
  });
  if (!out.values.allFinite()) {
    fail(ErrorCode::disconnected, "apsp: graph is disconnected (infinite distance)");
  }
  // Dijkstra can differ in the last bit between directions.
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  return out;
}

DistanceMatrix max_scale(DistanceMatrix d) {
  if (d.values.size() == 0 || !d.values.allFinite()) {
    fail(ErrorCode::invalid_input, "max_scale: empty or non-finite matrix");
  }
  const double mx = d.values.maxCoeff();
  if (!(mx > 0.0)) fail(ErrorCode::invalid_input, "max_scale: all-zero distance matrix");
  d.values /= mx;
  d.scale *= mx;
  return d;
}

std::vector<int> HopLayers::layer(int u, int k) const {
  std::vector<int> out;
  for (int v = 0; v < m; ++v) {
    if (v != u && (*this)(u, v) == k) out.push_back(v);
  }
  return out;
}

HopLayers hop_layers(const Graph& g) {
  if (g.weighted) fail(ErrorCode::unsupported, "hop layers require an unweighted graph");
  HopLayers h;
  h.m = g.m;
  h.hop.assign(static_cast<std::size_t>(g.m) * static_cast<std::size_t>(g.m), -1);
  for (int s = 0; s < g.m; ++s) {
    int* row = h.hop.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(g.m);
    row[s] = 0;
    std::vector<int> queue{s};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          h.diameter = std::max(h.diameter, row[v]);
          queue.push_back(v);
        }
      }
    }
    if (queue.size() != static_cast<std::size_t>(g.m)) {
      fail(ErrorCode::disconnected, "hop layers: graph is disconnected");
    }
  }
  return h;
}

namespace {

constexpr char kMagic[4] = {'M', 'M', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    fail(ErrorCode::io, "distance cache '" + path + "' is truncated");
  }
  return v;
}

}  // namespace

void save_distance_cache(const std::string& path, const DistanceMatrix& d) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write distance cache '" + path + "'");
  out.write(kMagic, 4);
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(d.m()));
  write_le<double>(out, d.scale);
  std::vector<float> row(static_cast<std::size_t>(d.m()));
  for (int i = 0; i < d.m(); ++i) {
    for (int j = 0; j < d.m(); ++j) row[static_cast<std::size_t>(j)] = static_cast<float>(d.values(i, j));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) fail(ErrorCode::io, "write failed for distance cache '" + path + "'");
}

DistanceMatrix load_distance_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open distance cache '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    fail(ErrorCode::io, "'" + path + "' is not a distance cache");
  }
  const auto version = read_le<std::uint32_t>(in, path);
  if (version != kVersion) {
    fail(ErrorCode::io, "distance cache '" + path + "' has unsupported version " + std::to_string(version));
  }
  const auto m = read_le<std::uint64_t>(in, path);
  if (m > 200000) fail(ErrorCode::io, "distance cache '" + path + "' has implausible size");
  DistanceMatrix d;
  d.scale = read_le<double>(in, path);
  d.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<float> row(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(m * sizeof(float)))) {
      fail(ErrorCode::io, "distance cache '" + path + "' is truncated");
    }
    for (std::uint64_t j = 0; j < m; ++j) {
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return d;
}

DistanceMatrix load_dissimilarity(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open dissimilarity matrix '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of("#%");
    if (cut != std::string::npos) line.resize(cut);
    for (char& c : line) {
      if (c == ',' || c == ';') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) fail(ErrorCode::invalid_input, path + ": non-numeric entry");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t m = rows.size();
  if (m < 2) fail(ErrorCode::invalid_input, path + ": need at least a 2x2 matrix");
  DistanceMatrix d;
  d.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m) fail(ErrorCode::invalid_input, path + ": matrix is not square");
    for (std::size_t j = 0; j < m; ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::invalid_input, path + ": negative or non-finite entry");
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  if ((d.values - d.values.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    spdlog::warn("{}: asymmetric dissimilarities averaged with their transpose", path);
    d.values = 0.5 * (d.values + d.values.transpose()).eval();
  }
  d.values.diagonal().setZero();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= 0.0) {
        fail(ErrorCode::invalid_input, path + ": off-diagonal dissimilarity must be positive");
      }
    }
  }
  return d;
}

bool graph_from_distances(const DistanceMatrix& d, Graph& out) {
  const int m = d.m();
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double h = d.values(i, j) * d.scale;
      if (std::abs(h - std::round(h)) > 1e-3) return false;
      if (j > i && std::round(h) == 1.0) edges.push_back({i, j, 1.0});
    }
  }
  Graph g = make_graph(m, edges);
  if (!is_connected(g)) return false;
  // The hop metric of the recovered graph must reproduce the input.
  const HopLayers h = hop_layers(g);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (std::abs(h(i, j) - d.values(i, j) * d.scale) > 1e-3) return false;
    }
  }
  out = std::move(g);
  return true;
}

}  // namespace matman
