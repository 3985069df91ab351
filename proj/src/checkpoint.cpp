#include "sagenet/checkpoint.hpp"

#include <fstream>

#include "binary_io.hpp"

namespace sagenet {

using nlohmann::json;

void write_params(std::ostream& os, const ModelParams& params) {
  const auto tensors = params.tensors();
  os.write(kModelMagic.data(), kModelMagic.size());
  detail::put<std::uint64_t>(os, tensors.size());
  for (const auto* t : tensors) {
    detail::put<std::uint64_t>(os, t->rows());
    detail::put<std::uint64_t>(os, t->cols());
  }
  for (const auto* t : tensors)
    for (double v : t->value.data()) detail::put(os, v);
  if (!os) throw Error("failed writing model weights");
}

void read_params(std::istream& is, ModelParams& params) {
  detail::Reader in(is, "model weights");
  in.expect_magic(kModelMagic);
  auto tensors = params.tensors();
  const auto count = in.get<std::uint64_t>();
  if (count != tensors.size())
    in.fail("expected " + std::to_string(tensors.size()) + " tensors, found " + std::to_string(count));
  for (const auto* t : tensors) {
    const auto r = in.get<std::uint64_t>();
    const auto c = in.get<std::uint64_t>();
    if (r != t->rows() || c != t->cols())
      in.fail("tensor shape " + std::to_string(r) + "x" + std::to_string(c) + " does not match expected " +
              std::to_string(t->rows()) + "x" + std::to_string(t->cols()));
  }
  for (auto* t : tensors) {
    for (double& v : t->value.data()) v = in.get<double>();
    t->zero_grad();
    t->reset_state();
  }
  in.expect_end();
}

json config_to_json(const ModelConfig& c) {
  return json{{"input_dim", c.input_dim}, {"visual_dim", c.visual_dim}, {"hidden_dim", c.hidden_dim},
              {"proj_dim", c.proj_dim},   {"depth", c.depth},           {"l2_normalize", c.l2_normalize}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.visual_dim = j.at("visual_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.proj_dim = j.at("proj_dim").get<std::size_t>();
  c.depth = j.at("depth").get<std::size_t>();
  c.l2_normalize = j.at("l2_normalize").get<bool>();
  return c;
}

json task_to_json(const TaskSpec& t) {
  return json{{"name", t.name},
              {"kind", std::string(task_kind_name(t.kind))},
              {"output_dim", t.output_dim},
              {"weight", t.weight},
              {"classes", t.classes}};
}

TaskSpec task_from_json(const json& j) {
  TaskSpec t;
  t.name = j.at("name").get<std::string>();
  t.kind = parse_task_kind(j.at("kind").get<std::string>());
  t.output_dim = j.at("output_dim").get<std::size_t>();
  t.weight = j.at("weight").get<double>();
  t.classes = j.at("classes").get<std::vector<std::string>>();
  t.validate();
  return t;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, std::string_view suffix) {
  auto p = prefix;
  p += std::string(suffix);
  return p;
}

void save_model(const std::filesystem::path& prefix, const ModelParams& params, std::span<const TaskSpec> tasks,
                const json& extra) {
  {
    std::ofstream os(with_suffix(prefix, ".sgm"), std::ios::binary);
    if (!os) throw Error("cannot open " + with_suffix(prefix, ".sgm").string() + " for writing");
    write_params(os, params);
  }
  json side;
  side["format"] = std::string(kModelMagic);
  side["config"] = config_to_json(params.config);
  side["tasks"] = json::array();
  for (const auto& t : tasks) side["tasks"].push_back(task_to_json(t));
  side["extra"] = extra;
  std::ofstream js(with_suffix(prefix, ".json"));
  if (!js) throw Error("cannot open " + with_suffix(prefix, ".json").string() + " for writing");
  js << side.dump(2) << '\n';
}

ModelBundle load_model(const std::filesystem::path& prefix) {
  std::ifstream js(with_suffix(prefix, ".json"));
  if (!js) throw Error("cannot open model sidecar " + with_suffix(prefix, ".json").string());
  json side;
  try {
    side = json::parse(js);
  } catch (const json::exception& e) {
    throw Error("model sidecar: " + std::string(e.what()));
  }
  ModelBundle b;
  try {
    for (const auto& t : side.at("tasks")) b.tasks.push_back(task_from_json(t));
    b.params = ModelParams::init(config_from_json(side.at("config")), b.tasks, 0);
    b.extra = side.value("extra", json::object());
  } catch (const json::exception& e) {
    throw Error("model sidecar: " + std::string(e.what()));
  }
  std::ifstream bin(with_suffix(prefix, ".sgm"), std::ios::binary);
  if (!bin) throw Error("cannot open model weights " + with_suffix(prefix, ".sgm").string());
  read_params(bin, b.params);
  return b;
}

}  // namespace sagenet
