#pragma once

// Double-loop reference losses written straight from their definitions.
// Gradients follow the chain rule per ordered pair: dL/dD_ac, with
// D_ac = s^2 * model_sqdist(y_a, y_c), times the pair gradient of D.

#include <cmath>
#include <vector>

#include "matman/embedding.hpp"
#include "matman/graph.hpp"
#include "matman/losses.hpp"

namespace oracle {

struct LossValue {
  double value = 0.0;
  std::vector<matman::Mat> grads;
  double grad_log_scale = 0.0;
};

inline LossValue brute_force_loss(const matman::LossSpec& spec, const matman::EmbeddingSet& y,
                                  const matman::Graph* g, const matman::DistanceMatrix* dist,
                                  const std::vector<int>& batch) {
  using matman::LossKind;
  const std::size_t b = batch.size();
  const auto& man = *y.manifold;
  const double s2 = y.scale() * y.scale();
  std::vector<std::vector<double>> D(b, std::vector<double>(b, 0.0)), coef(b, std::vector<double>(b, 0.0));
  for (std::size_t a = 0; a < b; ++a)
    for (std::size_t c = 0; c < b; ++c)
      if (a != c) D[a][c] = s2 * man.model_sqdist(y.points[batch[a]], y.points[batch[c]]);

  LossValue out;
  auto graph_d = [&](std::size_t a, std::size_t c) { return (*dist)(batch[a], batch[c]); };
  switch (spec.kind) {
    case LossKind::stress:
      for (std::size_t a = 0; a < b; ++a)
        for (std::size_t c = a + 1; c < b; ++c) {
          const double d = std::sqrt(D[a][c]), gd = graph_d(a, c);
          out.value += (gd - d) * (gd - d);
          coef[a][c] += -(gd - d) / d;
        }
      break;
    case LossKind::distortion:
      for (std::size_t a = 0; a < b; ++a)
        for (std::size_t c = a + 1; c < b; ++c) {
          const double g2 = graph_d(a, c) * graph_d(a, c);
          const double r = D[a][c] / g2 - 1.0;
          out.value += std::abs(r);
          coef[a][c] += (r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0)) / g2;
        }
      break;
    case LossKind::rsne:
      for (std::size_t a = 0; a < b; ++a) {
        double zp = 0.0, zq = 0.0;
        for (std::size_t c = 0; c < b; ++c) {
          if (c == a) continue;
          zp += std::exp(-graph_d(a, c) * graph_d(a, c) / spec.temperature);
          zq += std::exp(-D[a][c]);
        }
        for (std::size_t c = 0; c < b; ++c) {
          if (c == a) continue;
          const double p = std::exp(-graph_d(a, c) * graph_d(a, c) / spec.temperature) / zp;
          const double q = std::exp(-D[a][c]) / zq;
          if (p > 0.0) out.value += p * std::log(p / q);
          coef[std::min(a, c)][std::max(a, c)] += p - q;
        }
      }
      break;
    case LossKind::neighborhood:
      for (std::size_t a = 0; a < b; ++a) {
        std::vector<std::size_t> nb;
        for (std::size_t c = 0; c < b; ++c)
          if (c != a && g->has_edge(batch[a], batch[c])) nb.push_back(c);
        double z = 0.0;
        for (std::size_t c : nb) z += std::exp(-std::sqrt(D[a][c]));
        for (std::size_t c : nb) out.value += std::sqrt(D[a][c]) + std::log(z);
        for (std::size_t c : nb) {
          const double d = std::sqrt(D[a][c]);
          const double soft = std::exp(-d) / z;
          coef[std::min(a, c)][std::max(a, c)] += (1.0 - nb.size() * soft) / (2.0 * d);
        }
      }
      break;
  }

  out.grads.assign(b, man.zero_tangent());
  for (std::size_t a = 0; a < b; ++a) {
    for (std::size_t c = a + 1; c < b; ++c) {
      if (coef[a][c] == 0.0) continue;
      matman::Mat ga, gc;
      man.model_sqdist_grad(y.points[batch[a]], y.points[batch[c]], ga, gc);
      out.grads[a] += coef[a][c] * s2 * ga;
      out.grads[c] += coef[a][c] * s2 * gc;
      out.grad_log_scale += coef[a][c] * 2.0 * D[a][c];
    }
  }
  return out;
}

}  // namespace oracle
