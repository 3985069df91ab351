#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "sagenet/model.hpp"

namespace sagenet {

inline constexpr std::string_view kModelMagic = "SGM1";

/// Binary weights: magic, u64 tensor count, (u64 rows, u64 cols) per tensor,
/// then every tensor's values as little-endian f64 in declaration order.
void write_params(std::ostream& os, const ModelParams& params);
/// `params` must already have the expected shapes; they are verified.
void read_params(std::istream& is, ModelParams& params);

struct ModelBundle {
  ModelParams params;
  std::vector<TaskSpec> tasks;
  nlohmann::json extra;  // caller metadata (data paths, options)
};

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);
nlohmann::json task_to_json(const TaskSpec& t);
TaskSpec task_from_json(const nlohmann::json& j);

/// Writes `<prefix>.sgm` and the `<prefix>.json` sidecar.
void save_model(const std::filesystem::path& prefix, const ModelParams& params, std::span<const TaskSpec> tasks,
                const nlohmann::json& extra = nlohmann::json::object());
ModelBundle load_model(const std::filesystem::path& prefix);

std::filesystem::path with_suffix(const std::filesystem::path& prefix, std::string_view suffix);

}  // namespace sagenet
