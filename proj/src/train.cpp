#include "matman/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "matman/error.hpp"

namespace matman {

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::invalid_input, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::invalid_input, "config key '" + key + "': expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) fail(ErrorCode::invalid_input, "config key '" + key + "': expected an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  fail(ErrorCode::invalid_input, "config key '" + key + "': expected a boolean");
}

}  // namespace

void apply_train_keys(TrainConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "loss") cfg.loss = parse_loss(v);
    else if (k == "optimizer") cfg.optimizer = parse_optimizer(v);
    else if (k == "learning_rate") cfg.learning_rate = to_double(k, v);
    else if (k == "max_epochs") cfg.max_epochs = to_int(k, v);
    else if (k == "batch_nodes") cfg.batch_nodes = to_int(k, v);
    else if (k == "burn_in_epochs") cfg.burn_in_epochs = to_int(k, v);
    else if (k == "burn_in_factor") cfg.burn_in_factor = to_double(k, v);
    else if (k == "plateau_patience") cfg.plateau_patience = to_int(k, v);
    else if (k == "plateau_factor") cfg.plateau_factor = to_double(k, v);
    else if (k == "min_lr") cfg.min_lr = to_double(k, v);
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "learn_scale") cfg.learn_scale = to_bool(k, v);
    else if (k == "init_radius") cfg.init_radius = to_double(k, v);
  }
}

TrainResult train(const Graph* graph, const DistanceMatrix& dist, ManifoldPtr manifold,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  return train_from(init_embedding(std::move(manifold), dist.m(), cfg.seed, cfg.init_radius), graph,
                    dist, cfg, on_epoch);
}

TrainResult train_from(EmbeddingSet y, const Graph* graph, const DistanceMatrix& dist,
                       const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (!(cfg.learning_rate > 0.0)) fail(ErrorCode::invalid_input, "learning rate must be positive");
  if (cfg.batch_nodes < 2) fail(ErrorCode::invalid_input, "batch_nodes must be >= 2");
  if (!(cfg.burn_in_factor > 0.0) || !(cfg.plateau_factor > 1.0)) {
    fail(ErrorCode::invalid_input, "burn-in and plateau factors must be positive (plateau > 1)");
  }
  if (y.m() != dist.m()) fail(ErrorCode::invalid_input, "embedding and distance sizes differ");
  const Manifold& man = *y.manifold;
  const int m = y.m();

  TrainResult out;
  OptimizerState opt = make_optimizer(cfg.optimizer, static_cast<std::size_t>(m));
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;

  double lr = cfg.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<Mat> grads(static_cast<std::size_t>(m));

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const bool burn_in = epoch < cfg.burn_in_epochs;
    const double step_lr = burn_in ? lr / cfg.burn_in_factor : lr;
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (int start = 0; start < m; start += cfg.batch_nodes) {
      const int end = std::min(m, start + cfg.batch_nodes);
      std::vector<int> batch(order.begin() + start, order.begin() + end);
      std::sort(batch.begin(), batch.end());
      if (batch.size() < 2) continue;
      const LossResult r = evaluate_loss(cfg.loss, y, graph, &dist, batch, true);
      epoch_loss += r.value;
      for (auto& g : grads) g = man.zero_tangent();
      for (std::size_t k = 0; k < batch.size(); ++k) grads[static_cast<std::size_t>(batch[k])] = r.grads[k];
      optimizer_step(opt, man, y.points, grads, step_lr, cfg.learn_scale ? &y.log_scale : nullptr,
                     r.grad_log_scale);
      if (cfg.check_invariants) {
        for (auto& p : y.points) {
          try {
            man.check_point(p, 1e-6);
          } catch (const Error&) {
            const Mat fixed = man.repair(p);
            man.check_point(fixed, 1e-6);
            p = fixed;
          }
        }
      }
    }
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorCode::numerical_domain, "training diverged (non-finite loss) at epoch " + std::to_string(epoch));
    }
    out.history.loss.push_back(epoch_loss);
    out.history.lr.push_back(step_lr);
    if (on_epoch) on_epoch(epoch, epoch_loss, step_lr);

    if (burn_in) continue;
    if (epoch_loss < best) {
      best = epoch_loss;
      since_best = 0;
    } else if (++since_best > cfg.plateau_patience) {
      lr /= cfg.plateau_factor;
      since_best = 0;
      spdlog::debug("epoch {}: plateau, learning rate -> {}", epoch, lr);
      if (lr < cfg.min_lr) {
        out.history.stopped_on_lr = true;
        break;
      }
    }
  }
  out.embedding = std::move(y);
  return out;
}

}  // namespace matman
