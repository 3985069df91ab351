#pragma once

#include <string>
#include <vector>

#include "sagenet/features.hpp"
#include "sagenet/ops.hpp"
#include "sagenet/sampler.hpp"

namespace sagenet {

enum class TaskKind { multiclass, regression, multilabel };

TaskKind parse_task_kind(std::string_view s);
std::string_view task_kind_name(TaskKind k);

struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::multiclass;
  std::size_t output_dim = 1;
  double weight = 1.0;
  /// Class names (multiclass) or tag names (multilabel); empty for regression.
  std::vector<std::string> classes;

  void validate() const;
};

/// Per-node targets for one task, indexed by node id.
struct TaskTargets {
  TaskKind kind = TaskKind::multiclass;
  std::vector<char> present;
  std::vector<int> cls;        // multiclass
  std::vector<double> value;   // regression
  nn::Tensor2 multi;           // multilabel, 0/1 per tag

  bool has(NodeId v) const { return v < present.size() && present[v]; }
};

/// Derives a task from the label values in the manifest: strings make a
/// multiclass task, numbers a regression task, string lists a multilabel
/// task. Classes are sorted.
TaskSpec infer_task(const RecordManifest& manifest, const std::string& name, double weight = 1.0);
TaskTargets build_targets(const RecordManifest& manifest, const TaskSpec& task);

struct ModelConfig {
  std::size_t input_dim = 0;
  /// 0 disables the visual branch (graph-only encoder).
  std::size_t visual_dim = 0;
  std::size_t hidden_dim = 256;
  std::size_t proj_dim = 256;
  std::size_t depth = 2;
  bool l2_normalize = false;

  std::size_t embedding_dim() const { return hidden_dim + (visual_dim ? proj_dim : 0); }
};

struct SageLayer {
  nn::ParamTensor w_self;   // applied to the node's own representation
  nn::ParamTensor w_neigh;  // applied to the neighbor mean
  nn::ParamTensor bias;
};

struct TaskHead {
  nn::ParamTensor w;
  nn::ParamTensor b;
};

struct ModelParams {
  ModelConfig config;
  std::vector<SageLayer> sage;
  nn::ParamTensor proj_w;
  nn::ParamTensor proj_b;
  std::vector<TaskHead> heads;

  /// Glorot weights, zero biases.
  static ModelParams init(const ModelConfig& config, std::span<const TaskSpec> tasks, Seed seed);

  /// All tensors in their serialization order: sage layers (self, neigh,
  /// bias), projection (weight, bias) when present, then heads.
  std::vector<nn::ParamTensor*> tensors();
  std::vector<const nn::ParamTensor*> tensors() const;
  std::size_t parameter_count() const;
  void zero_grad();
  bool all_finite() const;
};

/// Intermediate values kept for the backward pass of one SAGE layer at one
/// level.
struct SageStep {
  nn::Tensor2 agg;
  nn::Tensor2 pre;
  nn::Tensor2 act;  // relu(pre) for inner layers, pre for the last; input to normalization
};

struct EncoderPass {
  /// reps[l][d]: representation of level d after l layers (reps[0] = inputs).
  std::vector<std::vector<nn::Tensor2>> reps;
  std::vector<std::vector<SageStep>> steps;  // steps[l-1][d]

  const nn::Tensor2& output() const { return reps.back().front(); }
};

struct ForwardPass {
  EncoderPass encoder;
  nn::Tensor2 visual_in;
  nn::Tensor2 visual_pre;
  nn::Tensor2 embedding;  // fused multimodal embedding, pre-head
  std::vector<nn::Tensor2> outputs;
};

/// Graph encoder: layer l computes every level d <= depth - l from level d
/// and the mean of its sampled neighbors in level d + 1. Inner layers apply
/// ReLU; output rows align with the block seeds.
EncoderPass encode_pass(const ModelParams& params, const NodeFeatures& feats, const SampledBlock& block);
nn::Tensor2 encode(const ModelParams& params, const NodeFeatures& feats, const SampledBlock& block);

/// Fuses relu(projection(visual)) with the graph embedding and applies the
/// task heads. `visual` may be null only when the model has no visual branch.
ForwardPass forward(const ModelParams& params, const NodeFeatures& feats, const NodeFeatures* visual,
                    const SampledBlock& block);

/// Accumulates parameter gradients given d loss / d output for each head.
void backward(ModelParams& params, const ForwardPass& pass, const SampledBlock& block,
              std::span<const nn::Tensor2> d_outputs);

struct MultitaskLoss {
  double total = 0.0;
  std::vector<double> per_task;
  std::vector<std::size_t> counts;  // labelled rows per task
  std::vector<nn::Tensor2> grads;   // d total / d output, per task
};

/// Weighted sum of per-task losses over the seeds that carry each task's
/// label: cross-entropy, MAE or binary cross-entropy by task kind.
MultitaskLoss multitask_loss(std::span<const nn::Tensor2> outputs, std::span<const TaskTargets> targets,
                             std::span<const NodeId> seeds, std::span<const TaskSpec> tasks);

}  // namespace sagenet
