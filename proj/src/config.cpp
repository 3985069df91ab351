#include "sagenet/config.hpp"

#include <fstream>
#include <set>

namespace sagenet {

using nlohmann::json;

ModelConfig RunConfig::model(std::size_t input_dim, std::size_t visual_dim) const {
  ModelConfig m;
  m.input_dim = input_dim;
  m.visual_dim = visual_dim;
  m.hidden_dim = hidden_dim;
  m.proj_dim = proj_dim;
  m.depth = sampler.fanouts.size();
  m.l2_normalize = l2_normalize;
  return m;
}

void RunConfig::validate() const {
  optim.validate();
  if (hidden_dim == 0 || proj_dim == 0) throw Error("config: hidden_dim and proj_dim must be positive");
  if (sampler.fanouts.empty()) throw Error("config: fanouts must not be empty");
  for (auto f : sampler.fanouts)
    if (f == 0) throw Error("config: fanouts must be positive");
  if (eval_batch_size == 0) throw Error("config: eval_batch_size must be positive");
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  static const std::set<std::string> known{
      "optimizer", "lr",         "momentum",       "beta1",     "beta2",          "eps",
      "batch_size", "max_epochs", "early_stop_patience", "plateau", "plateau_factor", "plateau_patience",
      "hidden_dim", "proj_dim",  "depth",          "l2_normalize", "fanouts",    "mask_same_artist",
      "neighbors_from_train", "eval_batch_size"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw Error("config: unknown key '" + key + "'");

  RunConfig c;
  try {
    auto& o = c.optim;
    if (j.contains("optimizer")) o.kind = parse_optim_kind(j["optimizer"].get<std::string>());
    o.lr = j.value("lr", o.lr);
    o.momentum = j.value("momentum", o.momentum);
    o.beta1 = j.value("beta1", o.beta1);
    o.beta2 = j.value("beta2", o.beta2);
    o.eps = j.value("eps", o.eps);
    o.batch_size = j.value("batch_size", o.batch_size);
    o.max_epochs = j.value("max_epochs", o.max_epochs);
    o.early_stop_patience = j.value("early_stop_patience", o.early_stop_patience);
    o.plateau.enabled = j.value("plateau", o.plateau.enabled);
    o.plateau.factor = j.value("plateau_factor", o.plateau.factor);
    o.plateau.patience = j.value("plateau_patience", o.plateau.patience);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.proj_dim = j.value("proj_dim", c.proj_dim);
    c.l2_normalize = j.value("l2_normalize", c.l2_normalize);
    if (j.contains("fanouts")) c.sampler.fanouts = j["fanouts"].get<std::vector<std::size_t>>();
    c.sampler.mask_same_artist_hop1 = j.value("mask_same_artist", c.sampler.mask_same_artist_hop1);
    c.neighbors_from_train = j.value("neighbors_from_train", c.neighbors_from_train);
    c.eval_batch_size = j.value("eval_batch_size", c.eval_batch_size);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (j.contains("depth") && j["depth"].get<std::size_t>() != c.sampler.fanouts.size())
    throw Error("config: depth must equal the number of fanouts");
  c.validate();
  return c;
}

json run_config_to_json(const RunConfig& c) {
  const auto& o = c.optim;
  return json{{"optimizer", std::string(optim_kind_name(o.kind))},
              {"lr", o.lr},
              {"momentum", o.momentum},
              {"beta1", o.beta1},
              {"beta2", o.beta2},
              {"eps", o.eps},
              {"batch_size", o.batch_size},
              {"max_epochs", o.max_epochs},
              {"early_stop_patience", o.early_stop_patience},
              {"plateau", o.plateau.enabled},
              {"plateau_factor", o.plateau.factor},
              {"plateau_patience", o.plateau.patience},
              {"hidden_dim", c.hidden_dim},
              {"proj_dim", c.proj_dim},
              {"depth", c.sampler.fanouts.size()},
              {"l2_normalize", c.l2_normalize},
              {"fanouts", c.sampler.fanouts},
              {"mask_same_artist", c.sampler.mask_same_artist_hop1},
              {"neighbors_from_train", c.neighbors_from_train},
              {"eval_batch_size", c.eval_batch_size}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace sagenet
