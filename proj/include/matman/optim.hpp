#pragma once

#include <string>
#include <vector>

#include "matman/manifold.hpp"

namespace matman {

enum class OptimizerKind { rsgd, radam };

OptimizerKind parse_optimizer(const std::string& text);
const char* to_string(OptimizerKind kind);

/// Per-point first moments (tangent at the current point) and scalar second
/// moments, plus the same state for the log-scale parameter.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::radam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Mat> m1;
  std::vector<double> m2;
  double scale_m1 = 0.0;
  double scale_m2 = 0.0;
};

OptimizerState make_optimizer(OptimizerKind kind, std::size_t count);

/// y_i <- retract(y_i, -lr * g_i).
void rsgd_step(const Manifold& man, std::vector<Mat>& points, const std::vector<Mat>& rgrads,
               double lr);

/// Adaptive-moment step; the first moment is moved to the new tangent space
/// with the manifold's transport after each update.
void radam_step(OptimizerState& state, const Manifold& man, std::vector<Mat>& points,
                const std::vector<Mat>& rgrads, double lr);

/// Dispatches on state.kind; also updates the unconstrained scalar `param`
/// with gradient `param_grad` when `param` is non-null.
void optimizer_step(OptimizerState& state, const Manifold& man, std::vector<Mat>& points,
                    const std::vector<Mat>& rgrads, double lr, double* param = nullptr,
                    double param_grad = 0.0);

}  // namespace matman
