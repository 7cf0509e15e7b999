#include "matman/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matman/error.hpp"

namespace matman {

// Successive shortest augmenting paths on the bipartite residual graph.
// Bellman-Ford handles the negative residual costs; every augmentation
// saturates either a supply, a demand or reverses a flow edge, so the
// number of rounds is finite for real-valued masses.
double transport_cost(const std::vector<double>& a, const std::vector<double>& b,
                      const Eigen::MatrixXd& cost, Eigen::MatrixXd* plan) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  if (cost.rows() != na || cost.cols() != nb) fail(ErrorCode::invalid_input, "transport: cost shape mismatch");
  double sa = 0.0, sb = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) fail(ErrorCode::invalid_input, "transport: negative mass");
    sa += v;
  }
  for (double v : b) {
    if (!(v >= 0.0)) fail(ErrorCode::invalid_input, "transport: negative mass");
    sb += v;
  }
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa)) fail(ErrorCode::invalid_input, "transport: unequal total mass");

  std::vector<double> supply(a), demand(b);
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(na, nb);
  const double eps = 1e-14 * std::max(1.0, sa);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Nodes: sources 0..na-1, sinks na..na+nb-1.
  const int n = na + nb;
  for (int round = 0; round < 100 * (n + 1) * (n + 1); ++round) {
    double remaining = 0.0;
    for (double s : supply) remaining += s;
    if (remaining <= eps) break;

    std::vector<double> dist(static_cast<std::size_t>(n), inf);
    std::vector<int> prev(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < na; ++i) {
      if (supply[static_cast<std::size_t>(i)] > eps) dist[static_cast<std::size_t>(i)] = 0.0;
    }
    for (int it = 0; it < n; ++it) {
      bool changed = false;
      for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
          const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(na + j);
          // forward edge i -> j (uncapacitated)
          if (dist[si] < inf && dist[si] + cost(i, j) < dist[sj] - 1e-15) {
            dist[sj] = dist[si] + cost(i, j);
            prev[sj] = i;
            changed = true;
          }
          // backward edge j -> i where flow is positive
          if (flow(i, j) > eps && dist[sj] < inf && dist[sj] - cost(i, j) < dist[si] - 1e-15) {
            dist[si] = dist[sj] - cost(i, j);
            prev[si] = na + j;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    int sink = -1;
    double best = inf;
    for (int j = 0; j < nb; ++j) {
      const auto sj = static_cast<std::size_t>(na + j);
      if (demand[static_cast<std::size_t>(j)] > eps && dist[sj] < best) {
        best = dist[sj];
        sink = na + j;
      }
    }
    if (sink < 0) fail(ErrorCode::internal, "transport: no augmenting path");

    // Bottleneck along the path.
    double amount = demand[static_cast<std::size_t>(sink - na)];
    int v = sink;
    while (v >= na || prev[static_cast<std::size_t>(v)] >= 0) {
      const int p = prev[static_cast<std::size_t>(v)];
      if (v >= na) {
        v = p;
      } else {
        amount = std::min(amount, flow(v, p - na));
        v = p;
      }
    }
    amount = std::min(amount, supply[static_cast<std::size_t>(v)]);
    const int source = v;

    v = sink;
    while (v != source) {
      const int p = prev[static_cast<std::size_t>(v)];
      if (v >= na) {
        flow(p, v - na) += amount;
      } else {
        flow(v, p - na) -= amount;
      }
      v = p;
    }
    supply[static_cast<std::size_t>(source)] -= amount;
    demand[static_cast<std::size_t>(sink - na)] -= amount;
  }

  double total = 0.0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) total += std::max(0.0, flow(i, j)) * cost(i, j);
  }
  if (plan) *plan = flow.cwiseMax(0.0);
  return total;
}

}  // namespace matman
