#include "matman/graphgeom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "matman/error.hpp"
#include "matman/parallel.hpp"
#include "matman/transport.hpp"

namespace matman {

double four_point_delta(const DistanceMatrix& d, int a, int b, int c, int e) {
  std::array<double, 3> s = {d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)};
  std::sort(s.begin(), s.end(), std::greater<>());
  return 0.5 * (s[0] - s[1]);
}

DeltaResult delta_hyperbolicity(const DistanceMatrix& d, long long n_quadruples, std::uint64_t seed,
                                bool exhaustive) {
  const int m = d.m();
  if (m < 4) fail(ErrorCode::invalid_input, "delta: need at least four nodes");
  DeltaResult r;
  if (exhaustive || m <= 60) {
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int c = b + 1; c < m; ++c)
          for (int e = c + 1; e < m; ++e) r.samples.push_back(four_point_delta(d, a, b, c, e));
  } else {
    if (n_quadruples < 1) fail(ErrorCode::invalid_input, "delta: need a positive sample count");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, m - 1);
    r.samples.reserve(static_cast<std::size_t>(n_quadruples));
    while (static_cast<long long>(r.samples.size()) < n_quadruples) {
      std::array<int, 4> q = {pick(rng), pick(rng), pick(rng), pick(rng)};
      std::sort(q.begin(), q.end());
      if (std::adjacent_find(q.begin(), q.end()) != q.end()) continue;
      r.samples.push_back(four_point_delta(d, q[0], q[1], q[2], q[3]));
    }
  }
  double s = 0.0;
  for (double v : r.samples) {
    r.max = std::max(r.max, v);
    s += v;
  }
  r.mean = s / static_cast<double>(r.samples.size());
  return r;
}

namespace {

void lazy_measure(const Graph& g, int x, double alpha, std::vector<int>& support, std::vector<double>& mass) {
  const auto& nb = g.adjacency[static_cast<std::size_t>(x)];
  support.assign(1, x);
  mass.assign(1, alpha);
  const double share = nb.empty() ? 0.0 : (1.0 - alpha) / static_cast<double>(nb.size());
  for (int v : nb) {
    support.push_back(v);
    mass.push_back(share);
  }
  if (nb.empty()) mass[0] = 1.0;
}

}  // namespace

double ollivier_ricci_edge(const Graph& g, const DistanceMatrix& d, int u, int v, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(ErrorCode::invalid_input, "ricci: alpha must be in [0, 1)");
  if (u < 0 || v < 0 || u >= g.m || v >= g.m || !g.has_edge(u, v)) {
    fail(ErrorCode::invalid_input, "ricci: not an edge");
  }
  std::vector<int> su, sv;
  std::vector<double> mu, mv;
  lazy_measure(g, u, alpha, su, mu);
  lazy_measure(g, v, alpha, sv, mv);
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(su.size()), static_cast<Eigen::Index>(sv.size()));
  for (std::size_t i = 0; i < su.size(); ++i)
    for (std::size_t j = 0; j < sv.size(); ++j)
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d(su[i], sv[j]);
  const double w = transport_cost(mu, mv, cost);
  return 1.0 - w / d(u, v);
}

RicciResult ollivier_ricci(const Graph& g, const DistanceMatrix& d, double alpha) {
  RicciResult r;
  r.edges = g.edges();
  r.edge_curvature.assign(r.edges.size(), 0.0);
  parallel_for(r.edges.size(), [&](std::size_t k) {
    r.edge_curvature[k] = ollivier_ricci_edge(g, d, r.edges[k].u, r.edges[k].v, alpha);
  });
  std::vector<double> sum(static_cast<std::size_t>(g.m), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(g.m), 0);
  for (std::size_t k = 0; k < r.edges.size(); ++k) {
    for (int x : {r.edges[k].u, r.edges[k].v}) {
      sum[static_cast<std::size_t>(x)] += r.edge_curvature[k];
      ++cnt[static_cast<std::size_t>(x)];
    }
  }
  r.node_curvature.resize(static_cast<std::size_t>(g.m));
  for (int x = 0; x < g.m; ++x) {
    const auto sx = static_cast<std::size_t>(x);
    r.node_curvature[sx] = cnt[sx] > 0 ? sum[sx] / cnt[sx] : 0.0;
  }
  return r;
}

double graph_sectional(const Graph& g, const DistanceMatrix& d, int m_node, int y, int z) {
  if (y == z || !g.has_edge(m_node, y) || !g.has_edge(m_node, z)) {
    fail(ErrorCode::invalid_input, "graph sectional: y and z must be distinct neighbours of m");
  }
  double s = 0.0;
  int n = 0;
  const double dyz = d(y, z);
  for (int x = 0; x < g.m; ++x) {
    if (x == m_node) continue;
    const double dxm = d(x, m_node), dxy = d(x, y), dxz = d(x, z);
    const double k = dxm * dxm + 0.25 * dyz * dyz - 0.5 * (dxy * dxy + dxz * dxz);
    s += k / (2.0 * dxm);
    ++n;
  }
  return n > 0 ? s / n : 0.0;
}

std::vector<double> graph_sectional_samples(const Graph& g, const DistanceMatrix& d, long long n_samples,
                                            std::uint64_t seed) {
  struct Triple {
    int m, y, z;
  };
  long long total = 0;
  for (int x = 0; x < g.m; ++x) {
    const long long k = g.degree(x);
    total += k * (k - 1) / 2;
  }
  std::vector<Triple> triples;
  if (total <= n_samples) {
    for (int x = 0; x < g.m; ++x) {
      const auto& nb = g.adjacency[static_cast<std::size_t>(x)];
      for (std::size_t i = 0; i < nb.size(); ++i)
        for (std::size_t j = i + 1; j < nb.size(); ++j) triples.push_back({x, nb[i], nb[j]});
    }
  } else {
    std::vector<int> centers;
    for (int x = 0; x < g.m; ++x) {
      if (g.degree(x) >= 2) centers.push_back(x);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_center(0, centers.size() - 1);
    for (long long s = 0; s < n_samples; ++s) {
      const int x = centers[pick_center(rng)];
      const auto& nb = g.adjacency[static_cast<std::size_t>(x)];
      std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      while (j == i) j = pick(rng);
      triples.push_back({x, nb[i], nb[j]});
    }
  }
  std::vector<double> out(triples.size());
  parallel_for(triples.size(), [&](std::size_t k) {
    out[k] = graph_sectional(g, d, triples[k].m, triples[k].y, triples[k].z);
  });
  return out;
}

}  // namespace matman
