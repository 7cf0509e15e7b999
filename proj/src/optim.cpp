#include "matman/optim.hpp"

#include <cmath>

#include "matman/error.hpp"

namespace matman {

OptimizerKind parse_optimizer(const std::string& text) {
  if (text == "rsgd") return OptimizerKind::rsgd;
  if (text == "radam") return OptimizerKind::radam;
  fail(ErrorCode::invalid_input, "unknown optimizer '" + text + "'");
}

const char* to_string(OptimizerKind kind) {
  return kind == OptimizerKind::rsgd ? "rsgd" : "radam";
}

OptimizerState make_optimizer(OptimizerKind kind, std::size_t count) {
  OptimizerState s;
  s.kind = kind;
  s.m1.resize(count);
  s.m2.assign(count, 0.0);
  return s;
}

void rsgd_step(const Manifold& man, std::vector<Mat>& points, const std::vector<Mat>& rgrads,
               double lr) {
  if (points.size() != rgrads.size()) fail(ErrorCode::invalid_input, "rsgd: size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (rgrads[i].size() == 0 || rgrads[i].isZero(0.0)) continue;
    points[i] = man.retract(points[i], -lr * rgrads[i]);
  }
}

void radam_step(OptimizerState& st, const Manifold& man, std::vector<Mat>& points,
                const std::vector<Mat>& rgrads, double lr) {
  if (points.size() != rgrads.size() || st.m2.size() != points.size()) {
    fail(ErrorCode::invalid_input, "radam: size mismatch");
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Mat& x = points[i];
    const Mat& g = rgrads[i];
    if (st.m1[i].size() == 0) st.m1[i] = man.zero_tangent();
    st.m1[i] = st.beta1 * st.m1[i] + (1.0 - st.beta1) * g;
    st.m2[i] = st.beta2 * st.m2[i] + (1.0 - st.beta2) * std::max(0.0, man.inner(x, g, g));
    if (st.m1[i].isZero(0.0)) continue;
    const double denom = std::sqrt(st.m2[i] / c2) + st.eps;
    const Mat step = (-lr / (c1 * denom)) * st.m1[i];
    Mat next = man.retract(x, step);
    st.m1[i] = man.transport(x, next, st.m1[i]);
    points[i] = std::move(next);
  }
}

void optimizer_step(OptimizerState& st, const Manifold& man, std::vector<Mat>& points,
                    const std::vector<Mat>& rgrads, double lr, double* param, double param_grad) {
  if (st.kind == OptimizerKind::rsgd) {
    rsgd_step(man, points, rgrads, lr);
    if (param) *param -= lr * param_grad;
    return;
  }
  radam_step(st, man, points, rgrads, lr);
  if (param) {
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    st.scale_m1 = st.beta1 * st.scale_m1 + (1.0 - st.beta1) * param_grad;
    st.scale_m2 = st.beta2 * st.scale_m2 + (1.0 - st.beta2) * param_grad * param_grad;
    *param -= lr * (st.scale_m1 / c1) / (std::sqrt(st.scale_m2 / c2) + st.eps);
  }
}

}  // namespace matman
