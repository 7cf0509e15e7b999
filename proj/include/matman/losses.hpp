#pragma once

#include <string>
#include <vector>

#include "matman/embedding.hpp"
#include "matman/graph.hpp"

namespace matman {

enum class LossKind { neighborhood, stress, distortion, rsne };

struct LossSpec {
  LossKind kind = LossKind::rsne;
  double temperature = 1.0;  // rsne only
};

/// "neighborhood", "stress", "distortion", "rsne:T" (or "rsne" with T = 1).
LossSpec parse_loss(const std::string& text);
std::string to_string(const LossSpec& loss);

/// Loss over the node set `batch` (all pairs within it). Scaled model
/// distances are s * model_distance. grads[k] is the Riemannian gradient
/// with respect to the point of batch[k]; grad_log_scale is dL/d(log s).
struct LossResult {
  double value = 0.0;
  std::vector<Mat> grads;
  double grad_log_scale = 0.0;
};

/// Requires `graph` for the neighborhood loss and `dist` (max-scaled) for
/// the others.
LossResult evaluate_loss(const LossSpec& loss, const EmbeddingSet& y, const Graph* graph,
                         const DistanceMatrix* dist, const std::vector<int>& batch,
                         bool with_grad = true);

/// -sum over ordered edges (i, j) of log softmax_{k in N(i)} (-d(y_i, y_k)) at j,
/// with N(i) restricted to the batch.
LossResult loss_neighborhood(const EmbeddingSet& y, const Graph& g, const std::vector<int>& batch);
/// sum_{i<j} (d_G - d_M)^2.
LossResult loss_stress(const EmbeddingSet& y, const DistanceMatrix& d, const std::vector<int>& batch);
/// sum_{i<j} |d_M^2 / d_G^2 - 1|.
LossResult loss_distortion(const EmbeddingSet& y, const DistanceMatrix& d,
                           const std::vector<int>& batch);
/// sum_i KL(p_i || q_i) with p_ij ~ exp(-d_G^2 / T), q_ij ~ exp(-d_M^2),
/// both normalised over the batch.
LossResult loss_rsne(const EmbeddingSet& y, const DistanceMatrix& d, double temperature,
                     const std::vector<int>& batch);

/// Conditional distribution p_i over the batch (entry for i itself is 0).
std::vector<double> rsne_target(const DistanceMatrix& d, double temperature,
                                const std::vector<int>& batch, int source_pos);

/// All nodes 0..m-1.
std::vector<int> all_nodes(int m);

}  // namespace matman
