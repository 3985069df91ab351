#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sagenet/model.hpp"

namespace sagenet {

/// Everything needed to sample and run the model on a set of nodes.
struct InferenceContext {
  const ModelParams* params = nullptr;
  const Graph* graph = nullptr;  // already restricted to the allowed splits
  const NodeFeatures* feats = nullptr;
  const NodeFeatures* visual = nullptr;
  SamplerOptions sampler;
  std::span<const std::string> artists;
  Seed seed = 0;
  std::size_t batch_size = 1024;
  std::size_t threads = 1;
};

struct InferenceResult {
  std::vector<NodeId> nodes;
  nn::Tensor2 embeddings;            // fused pre-head embedding per node
  std::vector<nn::Tensor2> outputs;  // per task head, rows aligned with `nodes`
};

/// Runs the model over `nodes` in batches. Neighborhood draws depend only on
/// (seed, hop, node), so each row is identical to a single-node forward with
/// the same seed, whatever the batching or thread count.
InferenceResult run_inference(const InferenceContext& ctx, std::span<const NodeId> nodes);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace sagenet
