#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "matman/embedding.hpp"
#include "matman/graph.hpp"
#include "matman/losses.hpp"
#include "matman/optim.hpp"

namespace matman {

struct TrainConfig {
  LossSpec loss;
  OptimizerKind optimizer = OptimizerKind::radam;
  double learning_rate = 0.01;
  int max_epochs = 3000;
  int batch_nodes = 512;
  int burn_in_epochs = 10;
  double burn_in_factor = 10.0;
  int plateau_patience = 50;
  double plateau_factor = 10.0;
  double min_lr = 1e-5;
  std::uint64_t seed = 0;
  bool learn_scale = false;
  double init_radius = 0.1;
  /// Asserts the manifold constraints on every point after each step.
  bool check_invariants = false;
};

/// Reads "key = value" lines ('#' comments) into cfg; unknown keys are
/// returned untouched so callers can handle their own.
std::map<std::string, std::string> parse_key_values(const std::string& text);
void apply_train_keys(TrainConfig& cfg, const std::map<std::string, std::string>& kv);

struct TrainHistory {
  std::vector<double> loss;  // per-epoch sum of batch losses
  std::vector<double> lr;
  bool stopped_on_lr = false;
};

struct TrainResult {
  EmbeddingSet embedding;
  TrainHistory history;
};

using EpochCallback = std::function<void(int epoch, double loss, double lr)>;

/// graph may be null unless the loss is the neighborhood loss; dist must be
/// max-scaled.
TrainResult train(const Graph* graph, const DistanceMatrix& dist, ManifoldPtr manifold,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Continues from an existing embedding (same routine, no re-initialisation).
TrainResult train_from(EmbeddingSet init, const Graph* graph, const DistanceMatrix& dist,
                       const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace matman
