#include "matman/embedding.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "matman/error.hpp"
#include "matman/parallel.hpp"

namespace matman {

double EmbeddingSet::distance(int i, int j) const {
  return scale() * manifold->model_distance(points[static_cast<std::size_t>(i)],
                                            points[static_cast<std::size_t>(j)]);
}

Eigen::MatrixXd EmbeddingSet::distance_matrix() const {
  const int n = m();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (int j = static_cast<int>(i) + 1; j < n; ++j) {
      d(static_cast<Eigen::Index>(i), j) = distance(static_cast<int>(i), j);
    }
  });
  return d.triangularView<Eigen::StrictlyUpper>().toDenseMatrix() +
         d.triangularView<Eigen::StrictlyUpper>().transpose().toDenseMatrix();
}

EmbeddingSet init_embedding(ManifoldPtr manifold, int m, std::uint64_t seed, double radius) {
  if (!manifold) fail(ErrorCode::invalid_input, "init: null manifold");
  if (m < 0) fail(ErrorCode::invalid_input, "init: negative size");
  EmbeddingSet y;
  y.manifold = manifold;
  std::mt19937_64 rng(seed);
  const Mat base = manifold->base_point();
  y.points.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    if (radius <= 0.0) {
      y.points.push_back(base);
    } else {
      y.points.push_back(manifold->exp_map(base, manifold->random_tangent(base, radius, rng)));
    }
  }
  return y;
}

namespace {

constexpr char kMagic[5] = {'M', 'M', 'E', 'M', 'B'};

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    fail(ErrorCode::io, "checkpoint '" + path + "' is truncated");
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const EmbeddingSet& y) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write checkpoint '" + path + "'");
    out.write(kMagic, 5);
    const std::string spec = y.manifold->spec();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.size()));
    out.write(spec.data(), static_cast<std::streamsize>(spec.size()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(y.m()));
    put<double>(out, y.scale());
    for (const Mat& p : y.points) {
      out.write(reinterpret_cast<const char*>(p.data()),
                static_cast<std::streamsize>(p.size() * static_cast<Eigen::Index>(sizeof(double))));
    }
    if (!out) fail(ErrorCode::io, "write failed for checkpoint '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    fail(ErrorCode::io, "cannot move checkpoint into place at '" + path + "'");
  }
}

EmbeddingSet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint '" + path + "'");
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
    fail(ErrorCode::io, "'" + path + "' is not an embedding checkpoint");
  }
  const auto len = get<std::uint32_t>(in, path);
  if (len > 4096) fail(ErrorCode::io, "checkpoint '" + path + "' has a corrupt header");
  std::string spec(len, '\0');
  if (!in.read(spec.data(), len)) fail(ErrorCode::io, "checkpoint '" + path + "' is truncated");
  EmbeddingSet y;
  y.manifold = parse_manifold(spec);
  const auto m = get<std::uint64_t>(in, path);
  const double scale = get<double>(in, path);
  if (!(scale > 0.0)) fail(ErrorCode::io, "checkpoint '" + path + "' has a nonpositive scale");
  y.log_scale = std::log(scale);
  const Eigen::Index r = y.manifold->rows(), c = y.manifold->cols();
  y.points.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    Mat p(r, c);
    if (!in.read(reinterpret_cast<char*>(p.data()),
                 static_cast<std::streamsize>(p.size() * static_cast<Eigen::Index>(sizeof(double))))) {
      fail(ErrorCode::io, "checkpoint '" + path + "' is truncated");
    }
    y.points.push_back(std::move(p));
  }
  return y;
}

}  // namespace matman
