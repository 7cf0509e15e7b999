#include <gtest/gtest.h>

#include "loss_oracles.hpp"
#include "matman/error.hpp"
#include "matman/losses.hpp"
#include "oracles.hpp"

using namespace matman;

namespace {

Graph random_graph(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 1; i < m; ++i) edges.push_back({std::uniform_int_distribution<int>(0, i - 1)(rng), i, 1.0});
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (u(rng) < 0.2) edges.push_back({i, j, 1.0});
  return make_graph(m, edges);
}

struct Instance {
  Graph g;
  DistanceMatrix d;
  EmbeddingSet y;
};

Instance make_instance(const std::string& spec, std::uint64_t seed, int m = 9) {
  std::mt19937_64 rng(seed);
  Instance in;
  in.g = random_graph(m, rng);
  in.d = max_scale(apsp(in.g));
  in.y = init_embedding(parse_manifold(spec), m, seed, 1.0);
  in.y.log_scale = 0.3;
  return in;
}

const char* kSpecs[] = {"euclidean:2", "lorentz:2", "sphere:2", "spd:2", "stein:2", "grassmann:1,3"};
const char* kLosses[] = {"stress", "distortion", "rsne:1", "rsne:0.05", "neighborhood"};

}  // namespace

TEST(Losses, ParseAndPrint) {
  EXPECT_EQ(parse_loss("neigh").kind, LossKind::neighborhood);
  EXPECT_EQ(parse_loss("rsne").temperature, 1.0);
  EXPECT_EQ(parse_loss("rsne:0.5").temperature, 0.5);
  EXPECT_EQ(to_string(parse_loss("rsne:0.5")), "rsne:0.5");
  for (const char* bad : {"rsne:", "rsne:x", "rsne:-1", "rsne0.5", "mse"}) {
    EXPECT_THROW(parse_loss(bad), Error) << bad;
  }
}

class LossOracle : public ::testing::TestWithParam<std::tuple<const char*, const char*>> {};

TEST_P(LossOracle, MatchesDoubleLoop) {
  const auto [spec, loss_name] = GetParam();
  const LossSpec loss = parse_loss(loss_name);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Instance in = make_instance(spec, seed);
    for (const std::vector<int>& batch : {all_nodes(in.g.m), std::vector<int>{0, 2, 3, 5, 8}}) {
      const auto got = evaluate_loss(loss, in.y, &in.g, &in.d, batch);
      const auto ref = oracle::brute_force_loss(loss, in.y, &in.g, &in.d, batch);
      EXPECT_NEAR(got.value, ref.value, 1e-10 * std::max(1.0, std::abs(ref.value)));
      EXPECT_NEAR(got.grad_log_scale, ref.grad_log_scale, 1e-10 * std::max(1.0, std::abs(ref.grad_log_scale)));
      ASSERT_EQ(got.grads.size(), batch.size());
      for (std::size_t k = 0; k < batch.size(); ++k) {
        EXPECT_LT((got.grads[k] - ref.grads[k]).norm(), 1e-10 * std::max(1.0, ref.grads[k].norm()));
      }
    }
  }
}

TEST_P(LossOracle, GradientMatchesFiniteDifferences) {
  const auto [spec, loss_name] = GetParam();
  const LossSpec loss = parse_loss(loss_name);
  Instance in = make_instance(spec, 7);
  const auto batch = all_nodes(in.g.m);
  const auto got = evaluate_loss(loss, in.y, &in.g, &in.d, batch);
  const auto& man = *in.y.manifold;
  const double h = 1e-6;
  for (int i : {0, 4}) {
    for (const auto& e : man.tangent_basis(in.y.points[i])) {
      EmbeddingSet plus = in.y, minus = in.y;
      plus.points[i] = man.exp_map(in.y.points[i], h * e);
      minus.points[i] = man.exp_map(in.y.points[i], -h * e);
      const double fd = (evaluate_loss(loss, plus, &in.g, &in.d, batch, false).value -
                         evaluate_loss(loss, minus, &in.g, &in.d, batch, false).value) /
                        (2 * h);
      EXPECT_NEAR(man.inner(in.y.points[i], got.grads[i], e), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  EmbeddingSet plus = in.y, minus = in.y;
  plus.log_scale += h;
  minus.log_scale -= h;
  const double fd = (evaluate_loss(loss, plus, &in.g, &in.d, batch, false).value -
                     evaluate_loss(loss, minus, &in.g, &in.d, batch, false).value) /
                    (2 * h);
  EXPECT_NEAR(got.grad_log_scale, fd, 1e-5 * std::max(1.0, std::abs(fd)));
}

INSTANTIATE_TEST_SUITE_P(All, LossOracle, ::testing::Combine(::testing::ValuesIn(kSpecs), ::testing::ValuesIn(kLosses)));

TEST(Losses, RsneLowTemperatureConcentratesOnNeighbours) {
  std::mt19937_64 rng(9);
  const Graph g = random_graph(10, rng);
  const DistanceMatrix d = max_scale(apsp(g));
  const auto batch = all_nodes(g.m);
  for (int i = 0; i < g.m; ++i) {
    const auto p = rsne_target(d, 1e-3, batch, i);
    double tv = 0.0;
    for (int j = 0; j < g.m; ++j) {
      const double target = g.has_edge(i, j) ? 1.0 / g.degree(i) : 0.0;
      tv += 0.5 * std::abs(p[static_cast<std::size_t>(j)] - target);
    }
    EXPECT_LE(tv, 1e-6) << "node " << i;
  }
}

TEST(Losses, RsneTargetIsADistribution) {
  std::mt19937_64 rng(10);
  const Graph g = random_graph(8, rng);
  const DistanceMatrix d = max_scale(apsp(g));
  const auto p = rsne_target(d, 2.0, all_nodes(g.m), 3);
  double s = 0.0;
  for (double v : p) s += v;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_EQ(p[3], 0.0);
}

TEST(Losses, ExactEmbeddingHasZeroStressAndDistortion) {
  // Points on a line reproduce the path metric exactly.
  const Graph p4 = make_graph(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  const DistanceMatrix d = max_scale(apsp(p4));
  EmbeddingSet y;
  y.manifold = parse_manifold("euclidean:1");
  for (int i = 0; i < 4; ++i) y.points.push_back(Mat::Constant(1, 1, i / 3.0));
  EXPECT_NEAR(loss_stress(y, d, all_nodes(4)).value, 0.0, 1e-15);
  EXPECT_NEAR(loss_distortion(y, d, all_nodes(4)).value, 0.0, 1e-14);
}

TEST(Losses, Validation) {
  const Instance in = make_instance("euclidean:2", 1);
  EXPECT_THROW(evaluate_loss(parse_loss("neighborhood"), in.y, nullptr, &in.d, all_nodes(in.g.m)), Error);
  EXPECT_THROW(evaluate_loss(parse_loss("stress"), in.y, &in.g, nullptr, all_nodes(in.g.m)), Error);
  EXPECT_THROW(evaluate_loss(parse_loss("stress"), in.y, &in.g, &in.d, {0, 99}), Error);
}
