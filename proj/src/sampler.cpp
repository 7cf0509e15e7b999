#include "matman/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "matman/error.hpp"
#include "matman/graphgeom.hpp"
#include "matman/parallel.hpp"

namespace matman {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 point_rng(std::uint64_t seed, std::size_t index) {
  return std::mt19937_64(splitmix(splitmix(seed) ^ static_cast<std::uint64_t>(index)));
}

Mat gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) g(i, j) = normal(rng);
  return g;
}

// Q factor with R's diagonal made positive, which makes Q Haar-distributed.
Mat haar_frame(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  const Mat g = gaussian(n, k, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, k);
  const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

SampleCloud sample_uniform(ManifoldPtr manifold, int count, std::uint64_t seed) {
  if (!manifold) fail(ErrorCode::invalid_input, "sampler: null manifold");
  if (count < 0) fail(ErrorCode::invalid_input, "sampler: negative count");
  const ManifoldKind kind = manifold->kind();
  if (kind != ManifoldKind::sphere && kind != ManifoldKind::grassmann &&
      kind != ManifoldKind::special_orthogonal) {
    fail(ErrorCode::invalid_input, "uniform sampling needs a sphere, Grassmann or SO(n) spec, got " +
                                       manifold->spec());
  }
  SampleCloud cloud{manifold, std::vector<Mat>(static_cast<std::size_t>(count))};
  const Eigen::Index r = manifold->rows(), c = manifold->cols();
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    auto rng = point_rng(seed, i);
    Mat p;
    if (kind == ManifoldKind::sphere) {
      Mat g = gaussian(r, 1, rng);
      while (g.norm() < 1e-12) g = gaussian(r, 1, rng);
      p = g / g.norm();
    } else if (kind == ManifoldKind::grassmann) {
      p = haar_frame(r, c, rng);
    } else {
      p = haar_frame(r, r, rng);
      if (p.determinant() < 0.0) p.col(r - 1) *= -1.0;
    }
    cloud.points[i] = std::move(p);
  });
  return cloud;
}

SampleCloud sample_exp_ball(ManifoldPtr manifold, const Mat& base, double radius, int count,
                            std::uint64_t seed) {
  if (!manifold) fail(ErrorCode::invalid_input, "sampler: null manifold");
  if (!(radius >= 0.0)) fail(ErrorCode::invalid_input, "sampler: radius must be nonnegative");
  if (count < 0) fail(ErrorCode::invalid_input, "sampler: negative count");
  manifold->check_point(base);
  SampleCloud cloud{manifold, std::vector<Mat>(static_cast<std::size_t>(count))};
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    auto rng = point_rng(seed, i);
    cloud.points[i] = radius > 0.0 ? manifold->exp_map(base, manifold->random_tangent(base, radius, rng)) : base;
  });
  return cloud;
}

Eigen::MatrixXd cloud_distances(const SampleCloud& cloud) {
  const auto n = static_cast<Eigen::Index>(cloud.points.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(n); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cloud.manifold->distance(cloud.points[i], cloud.points[j]);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) d(i, j) = d(j, i);
  return d;
}

Graph threshold_graph(const Eigen::MatrixXd& dist, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_input, "threshold must be positive");
  const int n = static_cast<int>(dist.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) < tau) edges.push_back({i, j, 1.0});
  return make_graph(n, edges);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2) fail(ErrorCode::invalid_input, "grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

std::vector<SweepRow> sweep(const Eigen::MatrixXd& dist, const std::vector<double>& thresholds,
                            long long sectional_samples, std::uint64_t seed) {
  if (thresholds.size() < 2) fail(ErrorCode::invalid_input, "sweep needs at least two thresholds");
  std::vector<SweepRow> rows;
  for (double tau : thresholds) {
    SweepRow row;
    row.threshold = tau;
    const Graph g = threshold_graph(dist, tau);
    std::vector<double> deg;
    for (int i = 0; i < g.m; ++i) deg.push_back(g.degree(i));
    row.degree_q25 = quantile(deg, 0.25);
    row.degree_q50 = quantile(deg, 0.5);
    row.degree_q75 = quantile(deg, 0.75);
    row.empty = g.edge_count() == 0;
    if (!row.empty) {
      const Graph big = largest_component(g);
      row.largest_component = big.m;
      if (big.m >= 100 && sectional_samples > 0) {
        const DistanceMatrix hops = apsp(big);
        const auto k = graph_sectional_samples(big, hops, sectional_samples, seed);
        if (!k.empty()) {
          row.has_curvature = true;
          row.curv_q25 = quantile(k, 0.25);
          row.curv_q50 = quantile(k, 0.5);
          row.curv_q75 = quantile(k, 0.75);
        }
      }
    } else {
      row.largest_component = g.m > 0 ? 1 : 0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "threshold,degree_q25,degree_q50,degree_q75,curv_q25,curv_q50,curv_q75,largest_component\n";
  for (const auto& r : rows) {
    out << r.threshold << ',';
    if (r.empty) {
      out << "empty,empty,empty,,,," << r.largest_component << '\n';
      continue;
    }
    out << r.degree_q25 << ',' << r.degree_q50 << ',' << r.degree_q75 << ',';
    if (r.has_curvature) {
      out << r.curv_q25 << ',' << r.curv_q50 << ',' << r.curv_q75;
    } else {
      out << ",,";
    }
    out << ',' << r.largest_component << '\n';
  }
  return out.str();
}

}  // namespace matman
