#include <gtest/gtest.h>

#include "matman/error.hpp"
#include "matman/graphgeom.hpp"
#include "matman/transport.hpp"
#include "oracles.hpp"

using namespace matman;

namespace {

Graph cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return make_graph(n, e);
}

Graph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return make_graph(n, e);
}

Graph random_tree(int n, std::mt19937_64& rng) {
  std::vector<Edge> e;
  for (int i = 1; i < n; ++i) e.push_back({std::uniform_int_distribution<int>(0, i - 1)(rng), i, 1.0});
  return make_graph(n, e);
}

double brute_delta(const DistanceMatrix& d) {
  double best = 0.0;
  const int m = d.m();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        for (int e = c + 1; e < m; ++e) {
          double s[3] = {d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)};
          std::sort(s, s + 3, std::greater<double>());
          best = std::max(best, (s[0] - s[1]) / 2);
        }
  return best;
}

}  // namespace

TEST(Transport, MatchesAssignmentOracle) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> units(1, 3);
  for (int c = 0; c < 40; ++c) {
    const int na = 1 + static_cast<int>(rng() % 4), nb = 1 + static_cast<int>(rng() % 4);
    std::vector<int> ua(static_cast<std::size_t>(na)), ub(static_cast<std::size_t>(nb));
    int total_a = 0, total_b = 0;
    for (auto& u : ua) total_a += (u = units(rng));
    for (auto& u : ub) total_b += (u = units(rng));
    // Equalise total mass by topping up the last atom of the lighter side.
    if (total_a < total_b) ua.back() += total_b - total_a;
    if (total_b < total_a) ub.back() += total_a - total_b;
    const int total = std::max(total_a, total_b);
    if (total > 8) continue;
    std::vector<double> a, b;
    for (int u : ua) a.push_back(static_cast<double>(u) / total);
    for (int u : ub) b.push_back(static_cast<double>(u) / total);
    const Eigen::MatrixXd cost = oracle::random_matrix(na, nb, rng).cwiseAbs();
    Eigen::MatrixXd plan;
    const double got = transport_cost(a, b, cost, &plan);
    EXPECT_NEAR(got, oracle::transport_by_permutation(ua, ub, cost), 1e-12);
    EXPECT_LT((plan.rowwise().sum() - Eigen::Map<Eigen::VectorXd>(a.data(), na)).norm(), 1e-12);
    EXPECT_LT((plan.colwise().sum().transpose() - Eigen::Map<Eigen::VectorXd>(b.data(), nb)).norm(), 1e-12);
    EXPECT_GE(plan.minCoeff(), -1e-15);
  }
  EXPECT_THROW(transport_cost({1.0}, {0.5}, Eigen::MatrixXd::Zero(1, 1)), Error);
}

TEST(Delta, TreeIsZeroAndCycleSixIsOne) {
  std::mt19937_64 rng(72);
  for (int c = 0; c < 5; ++c) {
    const auto r = delta_hyperbolicity(apsp(random_tree(25, rng)), 0, 1, true);
    EXPECT_EQ(r.max, 0.0);
  }
  EXPECT_EQ(delta_hyperbolicity(apsp(cycle(6)), 0, 1, true).max, 1.0);
  EXPECT_EQ(four_point_delta(apsp(cycle(6)), 0, 1, 3, 4), 1.0);
}

TEST(Delta, MatchesBruteForce) {
  std::mt19937_64 rng(73);
  for (int c = 0; c < 5; ++c) {
    Graph t = random_tree(14, rng);
    std::vector<Edge> e = t.edges();
    e.push_back({0, 13, 1.0});
    e.push_back({3, 9, 1.0});
    const DistanceMatrix d = apsp(make_graph(14, e));
    const auto r = delta_hyperbolicity(d, 0, 0, true);
    EXPECT_DOUBLE_EQ(r.max, brute_delta(d));
    EXPECT_EQ(r.samples.size(), 1001u);  // C(14, 4)
  }
}

TEST(Delta, SampledModeIsSeeded) {
  const DistanceMatrix d = apsp(cycle(80));
  const auto a = delta_hyperbolicity(d, 500, 9), b = delta_hyperbolicity(d, 500, 9);
  EXPECT_EQ(a.samples.size(), 500u);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_LE(a.max, 20.0);
}

TEST(Ricci, CompleteGraphClosedForm) {
  const Graph k5 = complete(5);
  const DistanceMatrix d = apsp(k5);
  // alpha = 0: W = 1 / (n - 1), so kappa = (n - 2) / (n - 1).
  EXPECT_NEAR(ollivier_ricci_edge(k5, d, 0, 1, 0.0), 0.75, 1e-12);
  for (double alpha : {0.0, 0.5, 0.999}) {
    const auto r = ollivier_ricci(k5, d, alpha);
    for (double k : r.edge_curvature) EXPECT_GT(k, 0.0);
  }
}

TEST(Ricci, MatchesAssignmentOracle) {
  // Regular graphs with alpha = 1 / (k + 1) give uniform measures on k + 1
  // atoms, so optimal transport is an assignment problem.
  for (const Graph& g : {cycle(7), complete(4), cycle(5)}) {
    const DistanceMatrix d = apsp(g);
    const int k = g.degree(0);
    const double alpha = 1.0 / (k + 1);
    for (const auto& e : g.edges()) {
      std::vector<int> su{e.u}, sv{e.v};
      for (int w : g.adjacency[static_cast<std::size_t>(e.u)]) su.push_back(w);
      for (int w : g.adjacency[static_cast<std::size_t>(e.v)]) sv.push_back(w);
      Eigen::MatrixXd cost(su.size(), sv.size());
      for (std::size_t i = 0; i < su.size(); ++i)
        for (std::size_t j = 0; j < sv.size(); ++j) cost(i, j) = d(su[i], sv[j]);
      const double w = oracle::transport_by_permutation(std::vector<int>(su.size(), 1),
                                                        std::vector<int>(sv.size(), 1), cost);
      EXPECT_NEAR(ollivier_ricci_edge(g, d, e.u, e.v, alpha), 1.0 - w / d(e.u, e.v), 1e-12);
    }
  }
}

TEST(Ricci, TreeInternalEdgesNegative) {
  // Balanced ternary tree: every internal node has degree >= 3.
  std::vector<Edge> e;
  for (int i = 1; i < 40; ++i) e.push_back({(i - 1) / 3, i, 1.0});
  const Graph t = make_graph(40, e);
  const DistanceMatrix d = apsp(t);
  const auto r = ollivier_ricci(t, d, 0.999);
  int internal = 0;
  for (std::size_t i = 0; i < r.edges.size(); ++i) {
    if (t.degree(r.edges[i].u) >= 2 && t.degree(r.edges[i].v) >= 2) {
      ++internal;
      EXPECT_LT(r.edge_curvature[i], 0.0);
    }
  }
  EXPECT_GT(internal, 0);
  ASSERT_EQ(r.node_curvature.size(), 40u);
}

TEST(Ricci, PathInteriorIsFlat) {
  // The position function certifies W = 1 for every laziness.
  const Graph p = make_graph(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  for (double alpha : {0.0, 0.5, 0.999}) EXPECT_NEAR(ollivier_ricci_edge(p, apsp(p), 1, 2, alpha), 0.0, 1e-12);
}

TEST(Sectional, StarValue) {
  // Centre 0, leaves 1..4: x = y or z gives 0, the other leaves give -1.
  const Graph star = make_graph(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
  const DistanceMatrix d = apsp(star);
  EXPECT_DOUBLE_EQ(graph_sectional(star, d, 0, 1, 2), -0.5);
  EXPECT_THROW(graph_sectional(star, d, 1, 0, 2), Error);
}

TEST(Sectional, MatchesFormula) {
  const Graph g = cycle(8);
  const DistanceMatrix d = apsp(g);
  // m = 0, y = 1, z = 7, d(y, z) = 2.
  double ref = 0.0;
  for (int x = 1; x < 8; ++x) {
    const double dxm = d(x, 0);
    ref += (dxm * dxm + 1.0 - (d(x, 1) * d(x, 1) + d(x, 7) * d(x, 7)) / 2) / (2 * dxm);
  }
  EXPECT_NEAR(graph_sectional(g, d, 0, 1, 7), ref / 7, 1e-14);
  const auto s = graph_sectional_samples(g, d, 1000, 3);
  EXPECT_EQ(s.size(), 8u);  // one (y, z) pair per node
}
