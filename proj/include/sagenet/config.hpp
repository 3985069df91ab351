#pragma once

#include <filesystem>

#include <json.hpp>

#include "sagenet/trainer.hpp"

namespace sagenet {

/// Hyperparameters read from a training config file. Every key is optional;
/// unknown keys are rejected.
///
///   {"optimizer": "sgd" | "adam", "lr", "momentum", "beta1", "beta2", "eps",
///    "batch_size", "max_epochs", "early_stop_patience", "plateau": bool,
///    "plateau_factor", "plateau_patience", "hidden_dim", "proj_dim",
///    "depth", "l2_normalize", "fanouts": [25, 10], "mask_same_artist": bool,
///    "neighbors_from_train": bool, "eval_batch_size"}
struct RunConfig {
  OptimConfig optim;
  SamplerOptions sampler;
  std::size_t hidden_dim = 256;
  std::size_t proj_dim = 256;
  bool l2_normalize = false;
  bool neighbors_from_train = false;
  std::size_t eval_batch_size = 1024;

  /// Model config for the given input widths; depth follows the fanouts.
  ModelConfig model(std::size_t input_dim, std::size_t visual_dim) const;
  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sagenet
