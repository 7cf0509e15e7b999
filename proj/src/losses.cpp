#include "matman/losses.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>

#include "matman/error.hpp"
#include "matman/parallel.hpp"

namespace matman {

LossSpec parse_loss(const std::string& text) {
  LossSpec out;
  if (text == "neighborhood" || text == "neigh") {
    out.kind = LossKind::neighborhood;
  } else if (text == "stress") {
    out.kind = LossKind::stress;
  } else if (text == "distortion") {
    out.kind = LossKind::distortion;
  } else if (text.rfind("rsne", 0) == 0) {
    out.kind = LossKind::rsne;
    if (text.size() > 4) {
      if (text[4] != ':') fail(ErrorCode::invalid_input, "loss '" + text + "': expected rsne:T");
      try {
        std::size_t used = 0;
        out.temperature = std::stod(text.substr(5), &used);
        if (used != text.size() - 5) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        fail(ErrorCode::invalid_input, "loss '" + text + "': bad temperature");
      }
    }
    if (!(out.temperature > 0.0)) fail(ErrorCode::invalid_input, "rsne temperature must be > 0");
  } else {
    fail(ErrorCode::invalid_input, "unknown loss '" + text + "'");
  }
  return out;
}

std::string to_string(const LossSpec& loss) {
  switch (loss.kind) {
    case LossKind::neighborhood: return "neighborhood";
    case LossKind::stress: return "stress";
    case LossKind::distortion: return "distortion";
    case LossKind::rsne: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "rsne:%g", loss.temperature);
      return buf;
    }
  }
  return "unknown";
}

std::vector<int> all_nodes(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

namespace {

double log_sum_exp(const std::vector<double>& x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

// Squared model distances over the batch and, on request, their Riemannian
// gradients for the pairs flagged in `need`.
struct PairTable {
  std::size_t b = 0;
  Eigen::MatrixXd sq;  // unscaled model_sqdist
  std::vector<Mat> gx, gy;

  std::size_t index(std::size_t a, std::size_t c) const {
    return a * b - a * (a + 1) / 2 + (c - a - 1);
  }
};

template <typename Need>
PairTable build_pairs(const EmbeddingSet& y, const std::vector<int>& batch, bool with_grad,
                      Need need) {
  PairTable t;
  t.b = batch.size();
  t.sq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.b), static_cast<Eigen::Index>(t.b));
  const std::size_t npairs = t.b * (t.b - (t.b > 0 ? 1 : 0)) / 2;
  if (with_grad) {
    t.gx.resize(npairs);
    t.gy.resize(npairs);
  }
  const Manifold& man = *y.manifold;
  parallel_for(t.b, [&](std::size_t a) {
    const Mat& pa = y.points[static_cast<std::size_t>(batch[a])];
    for (std::size_t c = a + 1; c < t.b; ++c) {
      if (!need(a, c)) continue;
      const Mat& pc = y.points[static_cast<std::size_t>(batch[c])];
      double s;
      if (with_grad) {
        const std::size_t p = t.index(a, c);
        s = man.model_sqdist_grad(pa, pc, t.gx[p], t.gy[p]);
      } else {
        s = man.model_sqdist(pa, pc);
      }
      t.sq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = s;
      t.sq(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = s;
    }
  });
  return t;
}

// coef(a, c), a < c, is dL/dD_ac with D = s^2 * model_sqdist.
LossResult finish(const EmbeddingSet& y, const PairTable& t, const Eigen::MatrixXd& coef,
                  double value, bool with_grad) {
  LossResult r;
  r.value = value;
  if (!with_grad) return r;
  const double s2 = y.scale() * y.scale();
  r.grads.assign(t.b, y.manifold->zero_tangent());
  double gs = 0.0;
  for (std::size_t a = 0; a < t.b; ++a) {
    for (std::size_t c = a + 1; c < t.b; ++c) {
      const double k = coef(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
      if (k == 0.0) continue;
      const std::size_t p = t.index(a, c);
      r.grads[a] += (k * s2) * t.gx[p];
      r.grads[c] += (k * s2) * t.gy[p];
      gs += k * 2.0 * s2 * t.sq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
    }
  }
  r.grad_log_scale = gs;
  return r;
}

double gdist(const DistanceMatrix& d, const std::vector<int>& batch, std::size_t a, std::size_t c) {
  return d.values(batch[a], batch[c]);
}

}  // namespace

std::vector<double> rsne_target(const DistanceMatrix& d, double temperature,
                                const std::vector<int>& batch, int source_pos) {
  const std::size_t b = batch.size();
  const auto a = static_cast<std::size_t>(source_pos);
  std::vector<double> logits;
  logits.reserve(b);
  for (std::size_t c = 0; c < b; ++c) {
    if (c == a) continue;
    const double g = gdist(d, batch, a, c);
    logits.push_back(-g * g / temperature);
  }
  const double lz = log_sum_exp(logits);
  std::vector<double> p(b, 0.0);
  std::size_t k = 0;
  for (std::size_t c = 0; c < b; ++c) {
    if (c == a) continue;
    p[c] = std::exp(logits[k++] - lz);
  }
  return p;
}

LossResult loss_neighborhood(const EmbeddingSet& y, const Graph& g, const std::vector<int>& batch) {
  return evaluate_loss({LossKind::neighborhood, 1.0}, y, &g, nullptr, batch, true);
}
LossResult loss_stress(const EmbeddingSet& y, const DistanceMatrix& d, const std::vector<int>& batch) {
  return evaluate_loss({LossKind::stress, 1.0}, y, nullptr, &d, batch, true);
}
LossResult loss_distortion(const EmbeddingSet& y, const DistanceMatrix& d,
                           const std::vector<int>& batch) {
  return evaluate_loss({LossKind::distortion, 1.0}, y, nullptr, &d, batch, true);
}
LossResult loss_rsne(const EmbeddingSet& y, const DistanceMatrix& d, double temperature,
                     const std::vector<int>& batch) {
  return evaluate_loss({LossKind::rsne, temperature}, y, nullptr, &d, batch, true);
}

LossResult evaluate_loss(const LossSpec& loss, const EmbeddingSet& y, const Graph* graph,
                         const DistanceMatrix* dist, const std::vector<int>& batch,
                         bool with_grad) {
  const std::size_t b = batch.size();
  for (int v : batch) {
    if (v < 0 || v >= y.m()) fail(ErrorCode::invalid_input, "loss: batch index out of range");
  }
  if (loss.kind == LossKind::neighborhood) {
    if (!graph) fail(ErrorCode::invalid_input, "neighborhood loss needs the graph");
    if (graph->weighted) fail(ErrorCode::unsupported, "neighborhood loss needs an unweighted graph");
    if (graph->m != y.m()) fail(ErrorCode::invalid_input, "loss: graph and embedding sizes differ");
  } else {
    if (!dist) fail(ErrorCode::invalid_input, "loss needs the distance matrix");
    if (dist->m() != y.m()) fail(ErrorCode::invalid_input, "loss: distance and embedding sizes differ");
  }

  const double s2 = y.scale() * y.scale();
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
  auto add = [&](std::size_t a, std::size_t c, double k) {
    if (a > c) std::swap(a, c);
    coef(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) += k;
  };
  double value = 0.0;

  switch (loss.kind) {
    case LossKind::neighborhood: {
      std::vector<std::vector<std::size_t>> nbrs(b);
      for (std::size_t a = 0; a < b; ++a) {
        if (graph->degree(batch[a]) == 0) {
          fail(ErrorCode::invalid_input, "neighborhood loss: isolated node " + std::to_string(batch[a]));
        }
        for (std::size_t c = 0; c < b; ++c) {
          if (c != a && graph->has_edge(batch[a], batch[c])) nbrs[a].push_back(c);
        }
      }
      const auto t = build_pairs(y, batch, with_grad, [&](std::size_t a, std::size_t c) {
        return graph->has_edge(batch[a], batch[c]);
      });
      for (std::size_t a = 0; a < b; ++a) {
        const auto& nb = nbrs[a];
        if (nb.empty()) continue;
        std::vector<double> dd(nb.size()), neg(nb.size());
        for (std::size_t k = 0; k < nb.size(); ++k) {
          dd[k] = std::sqrt(std::max(0.0, s2 * t.sq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(nb[k]))));
          neg[k] = -dd[k];
        }
        const double lz = log_sum_exp(neg);
        const double n = static_cast<double>(nb.size());
        for (std::size_t k = 0; k < nb.size(); ++k) {
          value += dd[k] + lz;
          const double dl_dd = 1.0 - n * std::exp(neg[k] - lz);
          if (dd[k] > 1e-12) add(a, nb[k], dl_dd / (2.0 * dd[k]));
        }
      }
      return finish(y, t, coef, value, with_grad);
    }
    case LossKind::stress:
    case LossKind::distortion: {
      const auto t = build_pairs(y, batch, with_grad, [](std::size_t, std::size_t) { return true; });
      for (std::size_t a = 0; a < b; ++a) {
        for (std::size_t c = a + 1; c < b; ++c) {
          const double g = gdist(*dist, batch, a, c);
          const double dsq = s2 * t.sq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
          if (loss.kind == LossKind::stress) {
            const double dm = std::sqrt(std::max(0.0, dsq));
            value += (g - dm) * (g - dm);
            if (dm > 1e-15) add(a, c, -(g - dm) / dm);
          } else {
            if (!(g > 0.0)) {
              fail(ErrorCode::invalid_input, "distortion loss: zero graph distance between " +
                                                 std::to_string(batch[a]) + " and " + std::to_string(batch[c]));
            }
            const double ratio = dsq / (g * g);
            value += std::abs(ratio - 1.0);
            if (std::abs(ratio - 1.0) >= 1e-12) add(a, c, (ratio > 1.0 ? 1.0 : -1.0) / (g * g));
          }
        }
      }
      return finish(y, t, coef, value, with_grad);
    }
    case LossKind::rsne: {
      if (!(loss.temperature > 0.0)) fail(ErrorCode::invalid_input, "rsne temperature must be > 0");
      const auto t = build_pairs(y, batch, with_grad, [](std::size_t, std::size_t) { return true; });
      std::vector<double> logits;
      for (std::size_t a = 0; a < b; ++a) {
        if (b < 2) break;
        const auto p = rsne_target(*dist, loss.temperature, batch, static_cast<int>(a));
        logits.clear();
        for (std::size_t c = 0; c < b; ++c) {
          if (c != a) logits.push_back(-s2 * t.sq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
        }
        const double lz = log_sum_exp(logits);
        std::size_t k = 0;
        for (std::size_t c = 0; c < b; ++c) {
          if (c == a) continue;
          const double logq = logits[k++] - lz;
          if (p[c] > 0.0) value += p[c] * (std::log(p[c]) - logq);
          add(a, c, p[c] - std::exp(logq));
        }
      }
      return finish(y, t, coef, std::max(0.0, value), with_grad);
    }
  }
  fail(ErrorCode::internal, "unknown loss kind");
}

}  // namespace matman
