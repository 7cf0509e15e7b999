#include "matman/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "matman/error.hpp"
#include "matman/parallel.hpp"

namespace matman {

namespace {

constexpr double kTieTol = 1e-12;

void require_square(const Eigen::MatrixXd& d, int m) {
  if (d.rows() != m || d.cols() != m) fail(ErrorCode::invalid_input, "model distance matrix has the wrong size");
}

class Fenwick {
 public:
  explicit Fenwick(int n) : t_(static_cast<std::size_t>(n) + 1, 0) {}
  void add(int i) {
    for (++i; i < static_cast<int>(t_.size()); i += i & -i) ++t_[static_cast<std::size_t>(i)];
  }
  // Count of inserted keys < i.
  long long prefix(int i) const {
    long long s = 0;
    for (; i > 0; i -= i & -i) s += t_[static_cast<std::size_t>(i)];
    return s;
  }

 private:
  std::vector<long long> t_;
};

}  // namespace

F1Curve f1_at_k(const Graph& g, const Eigen::MatrixXd& model) {
  require_square(model, g.m);
  const HopLayers hops = hop_layers(g);
  const int m = g.m, diam = hops.diameter;
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(diam) + 1, 0.0));
  std::vector<std::vector<long long>> counts(static_cast<std::size_t>(m), std::vector<long long>(static_cast<std::size_t>(diam) + 1, 0));

  parallel_for(static_cast<std::size_t>(m), [&](std::size_t us) {
    const int u = static_cast<int>(us);
    // Nodes by model distance from u, the source first.
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = a == u ? -1.0 : model(u, a), db = b == u ? -1.0 : model(u, b);
      return da < db || (da == db && a < b);
    });
    // |B_G(v; u)| = number of nodes strictly fewer hops away, u included.
    std::vector<long long> below(static_cast<std::size_t>(diam) + 2, 0);
    for (int w = 0; w < m; ++w) ++below[static_cast<std::size_t>(hops(u, w)) + 1];
    for (std::size_t k = 1; k < below.size(); ++k) below[k] += below[k - 1];

    Fenwick tree(diam + 1);
    std::size_t ptr = 0;
    auto dist = [&](int w) { return w == u ? 0.0 : model(u, w); };
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
      const int v = order[idx];
      if (v == u) continue;
      const double dv = dist(v);
      const double threshold = dv - kTieTol * std::abs(dv);
      while (ptr < order.size() && dist(order[ptr]) < threshold) {
        tree.add(hops(u, order[ptr]));
        ++ptr;
      }
      const int k = hops(u, v);
      const long long bm = static_cast<long long>(ptr);
      const long long bg = below[static_cast<std::size_t>(k)];
      const long long tp = tree.prefix(k);
      double f1 = 0.0;
      if (bm > 0 && bg > 0 && tp > 0) {
        const double p = static_cast<double>(tp) / static_cast<double>(bm);
        const double r = static_cast<double>(tp) / static_cast<double>(bg);
        f1 = 2.0 * p * r / (p + r);
      }
      sums[us][static_cast<std::size_t>(k)] += f1;
      ++counts[us][static_cast<std::size_t>(k)];
    }
  });

  F1Curve curve;
  for (int k = 1; k <= diam; ++k) {
    double s = 0.0;
    long long c = 0;
    for (int u = 0; u < m; ++u) {
      s += sums[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)];
      c += counts[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)];
    }
    curve.values.push_back(c > 0 ? s / static_cast<double>(c) : 0.0);
    curve.counts.push_back(c);
  }
  return curve;
}

F1Curve f1_at_k(const Graph& g, const EmbeddingSet& y) {
  return f1_at_k(g, y.distance_matrix());
}

double auc_f1(const F1Curve& curve) {
  if (curve.values.empty() || curve.values.size() != curve.counts.size()) {
    fail(ErrorCode::invalid_input, "auc: empty or malformed curve");
  }
  double s = 0.0, c = 0.0;
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    s += static_cast<double>(curve.counts[k]) * curve.values[k];
    c += static_cast<double>(curve.counts[k]);
  }
  return c > 0.0 ? s / c : 0.0;
}

double mean_average_precision(const Graph& g, const Eigen::MatrixXd& model) {
  if (g.weighted) fail(ErrorCode::unsupported, "mAP requires an unweighted graph");
  require_square(model, g.m);
  std::vector<double> ap(static_cast<std::size_t>(g.m), -1.0);
  parallel_for(static_cast<std::size_t>(g.m), [&](std::size_t us) {
    const int u = static_cast<int>(us);
    const auto& nb = g.adjacency[us];
    if (nb.empty()) return;
    std::vector<double> others;
    others.reserve(static_cast<std::size_t>(g.m));
    for (int w = 0; w < g.m; ++w) {
      if (w != u) others.push_back(model(u, w));
    }
    std::sort(others.begin(), others.end());
    std::vector<double> nd;
    for (int v : nb) nd.push_back(model(u, v));
    std::sort(nd.begin(), nd.end());
    double s = 0.0;
    for (double dv : nd) {
      const double limit = dv + kTieTol * std::abs(dv);
      const auto ball = std::upper_bound(others.begin(), others.end(), limit) - others.begin();
      const auto hits = std::upper_bound(nd.begin(), nd.end(), limit) - nd.begin();
      s += static_cast<double>(hits) / static_cast<double>(ball);
    }
    ap[us] = s / static_cast<double>(nd.size());
  });
  double s = 0.0;
  int n = 0;
  for (double a : ap) {
    if (a >= 0.0) {
      s += a;
      ++n;
    }
  }
  return n > 0 ? s / n : 0.0;
}

double average_distortion(const DistanceMatrix& d, const Eigen::MatrixXd& model) {
  const int m = d.m();
  require_square(model, m);
  if (m < 2) return 0.0;
  double gmax = 0.0, mmax = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      gmax = std::max(gmax, d.values(i, j));
      mmax = std::max(mmax, model(i, j));
    }
  }
  if (!(gmax > 0.0)) fail(ErrorCode::invalid_input, "average distortion: zero graph metric");
  if (!(mmax > 0.0)) return 1.0;
  double s = 0.0;
  long long n = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double g = d.values(i, j) / gmax;
      if (!(g > 0.0)) fail(ErrorCode::invalid_input, "average distortion: zero off-diagonal graph distance");
      s += std::abs(model(i, j) / mmax - g) / g;
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

double angle_sum(const Manifold& man, const Mat& x, const Mat& y, const Mat& z) {
  auto angle = [&](const Mat& a, const Mat& b, const Mat& c) {
    const Mat u = man.log_map(a, b);
    const Mat v = man.log_map(a, c);
    const double nu = man.norm(a, u), nv = man.norm(a, v);
    if (!(nu > 1e-12) || !(nv > 1e-12)) fail(ErrorCode::degenerate, "angle sum: repeated triangle vertex");
    return std::acos(std::clamp(man.inner(a, u, v) / (nu * nv), -1.0, 1.0));
  };
  const double total = angle(x, y, z) + angle(y, z, x) + angle(z, x, y);
  return (total - std::numbers::pi) / (2.0 * std::numbers::pi);
}

std::vector<double> angle_sum_profile(const EmbeddingSet& y, int n_triples, std::uint64_t seed) {
  if (n_triples < 0) fail(ErrorCode::invalid_input, "angle profile: negative triple count");
  if (n_triples == 0) return {};
  if (y.m() < 3) fail(ErrorCode::invalid_input, "angle profile needs at least three points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, y.m() - 1);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_triples));
  long long redraws = 0;
  while (static_cast<int>(out.size()) < n_triples) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    try {
      out.push_back(angle_sum(*y.manifold, y.points[static_cast<std::size_t>(a)],
                              y.points[static_cast<std::size_t>(b)], y.points[static_cast<std::size_t>(c)]));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::cut_locus && e.code() != ErrorCode::degenerate) throw;
      if (++redraws > 10LL * n_triples) {
        fail(ErrorCode::degenerate, "angle profile: too many degenerate triangles");
      }
    }
  }
  return out;
}

MetricsReport evaluate(const Graph* graph, const DistanceMatrix& d, const EmbeddingSet& y,
                       int n_triples, std::uint64_t seed) {
  if (y.m() != d.m()) fail(ErrorCode::invalid_input, "evaluate: embedding and distance sizes differ");
  MetricsReport r;
  const Eigen::MatrixXd model = y.distance_matrix();
  if (graph) {
    if (graph->m != y.m()) fail(ErrorCode::invalid_input, "evaluate: graph and embedding sizes differ");
    r.has_graph = true;
    r.f1 = f1_at_k(*graph, model);
    r.auc = auc_f1(r.f1);
    r.map = mean_average_precision(*graph, model);
  }
  r.avg_distortion = average_distortion(d, model);
  r.angles = angle_sum_profile(y, n_triples, seed);
  return r;
}

std::string report_json(const MetricsReport& r) {
  nlohmann::json j;
  if (r.has_graph) {
    j["f1"] = r.f1.values;
    j["f1_counts"] = r.f1.counts;
    j["f1_at_1"] = r.f1.values.empty() ? 0.0 : r.f1.values.front();
    j["auc"] = r.auc;
    j["map"] = r.map;
  } else {
    j["f1"] = nullptr;
    j["auc"] = nullptr;
    j["map"] = nullptr;
  }
  j["avg_distortion"] = r.avg_distortion;
  if (!r.angles.empty()) {
    std::vector<double> s = r.angles;
    std::sort(s.begin(), s.end());
    j["angle_sum"] = {{"count", s.size()},
                      {"median", s[s.size() / 2]},
                      {"q25", s[s.size() / 4]},
                      {"q75", s[(3 * s.size()) / 4]}};
  }
  return j.dump(2);
}

std::string f1_csv(const F1Curve& curve) {
  std::ostringstream out;
  out.precision(10);
  out << "k,f1,count\n";
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    out << k + 1 << ',' << curve.values[k] << ',' << curve.counts[k] << '\n';
  }
  return out.str();
}

std::string histogram_csv(const std::vector<double>& samples, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) fail(ErrorCode::invalid_input, "histogram: bad range");
  std::vector<long long> c(static_cast<std::size_t>(bins), 0);
  for (double v : samples) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++c[static_cast<std::size_t>(b)];
  }
  std::ostringstream out;
  out.precision(10);
  out << "bin_lo,bin_hi,count,density\n";
  const double w = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double dens = samples.empty() ? 0.0 : static_cast<double>(c[static_cast<std::size_t>(b)]) / (static_cast<double>(samples.size()) * w);
    out << lo + b * w << ',' << lo + (b + 1) * w << ',' << c[static_cast<std::size_t>(b)] << ',' << dens << '\n';
  }
  return out.str();
}

}  // namespace matman
