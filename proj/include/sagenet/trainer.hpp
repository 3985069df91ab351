#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sagenet/inference.hpp"
#include "sagenet/metrics.hpp"
#include "sagenet/optim.hpp"

namespace sagenet {

/// Inputs shared by training and evaluation. Pointers are non-owning.
struct TrainData {
  const RecordManifest* manifest = nullptr;
  const Graph* graph = nullptr;  // full (downsampled) graph; split views are derived
  const NodeFeatures* feats = nullptr;
  const NodeFeatures* visual = nullptr;
  std::vector<TaskSpec> tasks;
  std::vector<TaskTargets> targets;
  std::vector<std::string> artists;  // per node, for hop-1 masking

  void validate() const;
};

/// Builds targets and the artist list from the manifest.
TrainData make_train_data(const RecordManifest& manifest, const Graph& graph, const NodeFeatures& feats,
                          const NodeFeatures* visual, std::vector<TaskSpec> tasks,
                          const std::string& artist_property = "artist");

struct EvalOptions {
  SamplerOptions sampler;
  Seed seed = 0;
  std::size_t batch_size = 1024;
  std::size_t threads = 1;
  /// Let evaluation nodes draw neighbors from the training split as well.
  bool neighbors_from_train = false;
  double cs_theta = 5.0;
  bool cs_strict = true;
  double cs_curve_start = 0.0;
  double cs_curve_stop = 50.0;
  double cs_curve_step = 1.0;
  double tag_threshold = 0.5;
};

struct TaskReport {
  std::string name;
  TaskKind kind = TaskKind::multiclass;
  std::size_t count = 0;
  double loss = 0.0;
  double accuracy = 0.0;        // multiclass, percent
  double mae = 0.0;             // regression
  double cumulative_score = 0.0;  // regression, percent at cs_theta
  std::vector<metrics::CsPoint> cs_curve;
  std::vector<double> abs_errors;
  double cf1 = 0.0, of1 = 0.0, map = 0.0;  // multilabel, in [0, 1]
  std::vector<double> per_class_f1;

  /// The single number tracked per epoch: accuracy, MAE or mAP.
  double headline() const;
  std::string headline_name() const;
};

struct EvalReport {
  std::string split;
  std::size_t node_count = 0;
  double total_loss = 0.0;
  std::vector<TaskReport> tasks;

  nlohmann::json to_json(std::span<const TaskSpec> specs) const;
};

/// Graph restricted to what `split` may see during inference.
Graph inference_view(const TrainData& data, Split split, bool neighbors_from_train);

EvalReport evaluate(const ModelParams& params, const TrainData& data, Split split, const EvalOptions& options);
/// Same, reusing an already restricted graph.
EvalReport evaluate(const ModelParams& params, const TrainData& data, const Graph& view, Split split,
                    const EvalOptions& options);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  std::vector<std::pair<std::string, double>> val_metrics;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;

  /// `epoch,train_loss,val_loss,lr,<metric columns>` with round-trip precision.
  void write_csv(std::ostream& os) const;
};

struct TrainOptions {
  OptimConfig optim;
  SamplerOptions sampler;
  Seed seed = 0;
  std::size_t eval_batch_size = 1024;
  std::size_t threads = 1;
  bool neighbors_from_train = false;
  /// Start regression head biases at the median training target.
  bool init_regression_bias = true;
  /// Print one line per epoch to this stream when set.
  std::ostream* progress = nullptr;
};

struct FitResult {
  ModelParams params;  // from the best validation epoch
  TrainLog log;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

/// Mini-batch training: seeded shuffles, per-batch neighborhood samples,
/// weighted multi-task loss, optimizer step; validation at every epoch end
/// drives the plateau scheduler, early stopping and best-checkpoint choice.
FitResult fit(ModelParams params, const TrainData& data, const TrainOptions& options);

}  // namespace sagenet
