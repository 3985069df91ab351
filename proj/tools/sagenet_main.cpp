// sagenet: command-line front end for graph building, training, evaluation
// and retrieval.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "sagenet/checkpoint.hpp"
#include "sagenet/config.hpp"
#include "sagenet/formats.hpp"
#include "sagenet/retrieval.hpp"
#include "sagenet/splits.hpp"
#include "sagenet/synthetic.hpp"
#include "sagenet/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sagenet;

namespace {

Seed resolve_seed(const std::optional<Seed>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SAGENET_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("SAGENET_SEED is not an unsigned integer: '" + std::string(env) + "'");
  }
  return 0;
}

Seed eval_seed(Seed seed) { return derive_seed(seed, 0xE7A1); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("'" + path.string() + "': " + e.what());
  }
}

std::vector<std::string> load_vocab(const fs::path& path) {
  const auto j = read_json(path);
  if (!j.is_array()) throw Error("vocabulary '" + path.string() + "' must be a JSON array of strings");
  auto vocab = j.get<std::vector<std::string>>();
  if (vocab.empty() || vocab.back() != kUnknownTag)
    throw Error("vocabulary '" + path.string() + "' must end with the \"Unknown\" tag");
  return vocab;
}

/// "style,date:0.5" -> names with optional weights.
std::vector<std::pair<std::string, double>> parse_tasks(const std::string& s) {
  std::vector<std::pair<std::string, double>> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto end = std::min(s.find(',', pos), s.size());
    std::string item = s.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) throw Error("empty task name in '" + s + "'");
    double weight = 1.0;
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      try {
        std::size_t used = 0;
        weight = std::stod(item.substr(colon + 1), &used);
        if (used != item.size() - colon - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error("bad task weight in '" + item + "'");
      }
      item.resize(colon);
    }
    out.emplace_back(item, weight);
  }
  return out;
}

/// Thetas as "start:stop:step".
std::array<double, 3> parse_range(const std::string& s) {
  std::array<double, 3> r{};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const auto end = k < 2 ? s.find(':', pos) : s.size();
    if (end == std::string::npos) throw Error("expected start:stop:step, got '" + s + "'");
    try {
      std::size_t used = 0;
      r[k] = std::stod(s.substr(pos, end - pos), &used);
      if (used != end - pos) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("expected start:stop:step, got '" + s + "'");
    }
    pos = end + 1;
  }
  return r;
}

/// Assigns splits when the manifest carries none; refuses partial ones.
void ensure_splits(RecordManifest& manifest, Seed seed) {
  std::size_t unassigned = 0;
  for (const auto& r : manifest.records()) unassigned += r.split == Split::unassigned;
  if (unassigned == 0) return;
  if (unassigned != manifest.size())
    throw Error(std::to_string(unassigned) + " records have no split while others do");
  apply_splits(manifest, make_splits(manifest, SplitFractions{}, seed));
}

/// Everything a saved model needs to run again, rebuilt from its sidecar.
struct Session {
  ModelBundle bundle;
  RunConfig config;
  Seed seed = 0;
  RecordManifest manifest;
  Graph graph;
  NodeFeatures feats;
  std::optional<NodeFeatures> visual;
  TrainData data;

  const NodeFeatures* visual_ptr() const { return visual ? &*visual : nullptr; }
};

NodeFeatures load_node_features(const json& inputs, const RecordManifest& manifest) {
  if (inputs.contains("bow_vocab"))
    return NodeFeatures::align(bow_features(manifest, load_vocab(inputs["bow_vocab"].get<std::string>())), manifest);
  return NodeFeatures::align(load_features(inputs.at("features").get<std::string>()), manifest);
}

void prepare_manifest(RecordManifest& manifest, const json& inputs, Seed seed) {
  if (inputs.value("derive_timeframes", false)) derive_timeframes(manifest);
  ensure_splits(manifest, seed);
}

std::unique_ptr<Session> open_session(const fs::path& prefix, const std::optional<Seed>& seed_flag) {
  auto s = std::make_unique<Session>();
  s->bundle = load_model(prefix);
  const auto& extra = s->bundle.extra;
  try {
    const auto& inputs = extra.at("inputs");
    s->config = run_config_from_json(extra.at("config"));
    s->seed = seed_flag ? *seed_flag : extra.at("seed").get<Seed>();
    s->manifest = load_manifest(inputs.at("manifest").get<std::string>());
    prepare_manifest(s->manifest, inputs, extra.at("seed").get<Seed>());
    s->graph = load_graph(inputs.at("graph").get<std::string>());
    s->feats = load_node_features(inputs, s->manifest);
    if (inputs.contains("visual"))
      s->visual = NodeFeatures::align(load_features(inputs["visual"].get<std::string>()), s->manifest);
  } catch (const json::exception& e) {
    throw Error("model sidecar for '" + prefix.string() + "': " + e.what());
  }
  if (s->graph.node_count() != s->manifest.size()) throw Error("graph does not match the manifest");
  const auto& cfg = s->bundle.params.config;
  if (cfg.input_dim != s->feats.dim()) throw Error("node feature width does not match the model");
  if (cfg.visual_dim != (s->visual ? s->visual->dim() : 0)) throw Error("visual feature width does not match the model");
  s->data = make_train_data(s->manifest, s->graph, s->feats, s->visual_ptr(), s->bundle.tasks);
  return s;
}

Split parse_split_flag(const std::string& name) {
  const Split s = parse_split(name);
  if (s == Split::unassigned) throw Error("a concrete split is required");
  return s;
}

/// Embeddings for one split (its own inference view) or for every record.
EmbeddingStore session_embeddings(const Session& s, const std::string& split_name_flag, std::size_t threads) {
  InferenceContext ctx;
  ctx.params = &s.bundle.params;
  ctx.feats = &s.feats;
  ctx.visual = s.visual_ptr();
  ctx.sampler = s.config.sampler;
  ctx.artists = s.data.artists;
  ctx.seed = eval_seed(s.seed);
  ctx.batch_size = s.config.eval_batch_size;
  ctx.threads = threads;
  if (split_name_flag == "all") {
    std::vector<NodeId> nodes(s.manifest.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<NodeId>(i);
    ctx.graph = &s.graph;
    return embed_all(ctx, s.manifest, nodes);
  }
  const Split split = parse_split_flag(split_name_flag);
  const Graph view = inference_view(s.data, split, s.config.neighbors_from_train);
  ctx.graph = &view;
  return embed_all(ctx, s.manifest, s.manifest.nodes_in(split));
}

std::string label_text(const Record& r, const std::string& name) {
  const Label* l = r.label(name);
  if (!l) return "-";
  if (const auto* s = std::get_if<std::string>(l)) return *s;
  if (const auto* d = std::get_if<double>(l)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *d);
    return buf;
  }
  const auto& tags = std::get<std::vector<std::string>>(*l);
  std::string out;
  for (const auto& t : tags) out += (out.empty() ? "" : "|") + t;
  return out.empty() ? "-" : out;
}

/// "yes"/"no" for equal single labels, "a/b" shared-of-query for tag lists,
/// "-" when either side lacks the label.
std::string match_text(const Record& q, const Record& r, const std::string& name) {
  const Label* a = q.label(name);
  const Label* b = r.label(name);
  if (!a || !b) return "-";
  if (const auto* qa = std::get_if<std::vector<std::string>>(a)) {
    const auto* rb = std::get_if<std::vector<std::string>>(b);
    if (!rb) return "-";
    std::size_t shared = 0;
    for (const auto& t : *qa) shared += std::find(rb->begin(), rb->end(), t) != rb->end();
    return std::to_string(shared) + "/" + std::to_string(qa->size());
  }
  return *a == *b ? "yes" : "no";
}

// ---- commands ----

struct GlobalOpts {
  std::optional<Seed> seed;
  std::size_t threads = 1;
};

void cmd_build_graph(const fs::path& manifest_path, const std::string& property, std::size_t max_degree,
                     const fs::path& out, const GlobalOpts& g) {
  const auto manifest = load_manifest(manifest_path);
  const Graph full = build_adjacency(manifest, property);
  const Graph capped = downsample_degrees(full, max_degree, resolve_seed(g.seed));
  save_graph(out, capped);
  std::cout << "nodes " << capped.node_count() << " edges " << capped.edge_count() << " (before cap "
            << full.edge_count() << ") max_degree " << capped.max_degree() << '\n';
}

void cmd_split(const fs::path& manifest_path, const std::vector<double>& fractions, bool timeframes,
               const fs::path& out, const GlobalOpts& g) {
  auto manifest = load_manifest(manifest_path);
  if (fractions.size() != 3) throw Error("--fractions takes train,val,test");
  SplitFractions f{fractions[0], fractions[1], fractions[2]};
  const auto a = make_splits(manifest, f, resolve_seed(g.seed));
  apply_splits(manifest, a);
  if (timeframes) std::cout << "timeframes derived for " << derive_timeframes(manifest) << " records\n";
  save_manifest(out, manifest);
  const auto c = a.counts();
  std::cout << "train " << c[0] << " val " << c[1] << " test " << c[2] << '\n';
}

void cmd_bow_vocab(const fs::path& manifest_path, std::size_t min_count, const fs::path& out) {
  const auto vocab = build_tag_vocab(load_manifest(manifest_path), min_count);
  write_json(out, json(vocab));
  std::cout << "vocabulary size " << vocab.size() << '\n';
}

struct TrainArgs {
  fs::path manifest, graph, features, visual, bow, config, out;
  std::string tasks = "style,artist,timeframe";
  bool quiet = false;
};

void cmd_train(const TrainArgs& a, const GlobalOpts& g) {
  const Seed seed = resolve_seed(g.seed);
  const RunConfig config = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  config.validate();
  if (a.features.empty() == a.bow.empty()) throw Error("give exactly one of --features or --bow");

  const auto task_list = parse_tasks(a.tasks);
  json inputs{{"manifest", fs::absolute(a.manifest).string()}, {"graph", fs::absolute(a.graph).string()}};
  if (!a.features.empty()) inputs["features"] = fs::absolute(a.features).string();
  if (!a.bow.empty()) inputs["bow_vocab"] = fs::absolute(a.bow).string();
  if (!a.visual.empty()) inputs["visual"] = fs::absolute(a.visual).string();
  for (const auto& [name, w] : task_list)
    if (name == "timeframe") inputs["derive_timeframes"] = true;

  auto manifest = load_manifest(a.manifest);
  prepare_manifest(manifest, inputs, seed);
  const Graph graph = load_graph(a.graph);
  if (graph.node_count() != manifest.size())
    throw Error("graph has " + std::to_string(graph.node_count()) + " nodes but the manifest has " +
                std::to_string(manifest.size()) + " records");
  const NodeFeatures feats = load_node_features(inputs, manifest);
  std::optional<NodeFeatures> visual;
  if (!a.visual.empty()) visual = NodeFeatures::align(load_features(a.visual), manifest);

  std::vector<TaskSpec> tasks;
  for (const auto& [name, w] : task_list) tasks.push_back(infer_task(manifest, name, w));
  const auto data = make_train_data(manifest, graph, feats, visual ? &*visual : nullptr, tasks);

  const ModelConfig mc = config.model(feats.dim(), visual ? visual->dim() : 0);
  auto params = ModelParams::init(mc, tasks, derive_seed(seed, 0x1417));

  TrainOptions opts;
  opts.optim = config.optim;
  opts.sampler = config.sampler;
  opts.seed = seed;
  opts.eval_batch_size = config.eval_batch_size;
  opts.threads = g.threads;
  opts.neighbors_from_train = config.neighbors_from_train;
  if (!a.quiet) opts.progress = &std::cout;
  const auto result = fit(std::move(params), data, opts);

  const json extra{{"inputs", inputs}, {"config", run_config_to_json(config)}, {"seed", seed},
                   {"best_epoch", result.best_epoch}, {"best_val_loss", result.best_val_loss},
                   {"epochs_run", result.log.epochs.size()}, {"stopped_early", result.stopped_early}};
  save_model(a.out, result.params, tasks, extra);
  std::ofstream log(with_suffix(a.out, ".log.csv"));
  if (!log) throw Error("cannot write training log");
  result.log.write_csv(log);
  std::cout << "best epoch " << result.best_epoch << " val_loss " << result.best_val_loss << " -> "
            << with_suffix(a.out, ".sgm").string() << '\n';
}

void cmd_eval(const fs::path& model, const std::string& split, const fs::path& report_path, const GlobalOpts& g) {
  const auto s = open_session(model, g.seed);
  EvalOptions opts;
  opts.sampler = s->config.sampler;
  opts.seed = eval_seed(s->seed);
  opts.batch_size = s->config.eval_batch_size;
  opts.threads = g.threads;
  opts.neighbors_from_train = s->config.neighbors_from_train;
  const auto report = evaluate(s->bundle.params, s->data, parse_split_flag(split), opts);
  const auto j = report.to_json(s->bundle.tasks);
  if (!report_path.empty()) write_json(report_path, j);
  std::cout << "split " << report.split << " nodes " << report.node_count << " loss " << report.total_loss << '\n';
  for (const auto& t : report.tasks) {
    std::cout << "  " << t.headline_name() << ' ' << t.headline();
    if (t.kind == TaskKind::regression) std::cout << " cs@" << opts.cs_theta << ' ' << t.cumulative_score;
    if (t.kind == TaskKind::multilabel) std::cout << " cf1 " << t.cf1 << " of1 " << t.of1;
    std::cout << '\n';
  }
}

void cmd_embed(const fs::path& model, const std::string& split, const fs::path& out, const GlobalOpts& g) {
  const auto s = open_session(model, g.seed);
  const auto store = session_embeddings(*s, split, g.threads);
  save_store(out, store);
  std::cout << "embedded " << store.size() << " records, dim " << store.dim() << '\n';
}

void cmd_retrieve(const fs::path& model, const fs::path& store_path, const std::string& split,
                  const std::string& query, std::size_t k, const GlobalOpts& g) {
  const auto s = open_session(model, g.seed);
  const EmbeddingStore store = store_path.empty() ? session_embeddings(*s, split, g.threads) : load_store(store_path);
  const auto hits = knn(store, query, k);

  std::vector<std::string> columns;
  for (const auto& t : s->bundle.tasks)
    if (t.kind != TaskKind::regression) columns.push_back(t.name);
  const auto q = s->manifest.find(query);
  if (!q) throw Error("query '" + query + "' is not in the manifest");
  const Record& qr = s->manifest[*q];

  std::cout << "query " << query;
  for (const auto& c : columns) std::cout << "  " << c << '=' << label_text(qr, c);
  std::cout << "\nrank\tid\tdistance";
  for (const auto& c : columns) std::cout << '\t' << c;
  std::cout << '\n';
  for (std::size_t i = 0; i < hits.size(); ++i) {
    char dist[32];
    std::snprintf(dist, sizeof dist, "%.6f", hits[i].distance);
    std::cout << i + 1 << '\t' << hits[i].id << '\t' << dist;
    const auto row = s->manifest.find(hits[i].id);
    for (const auto& c : columns)
      std::cout << '\t' << (row ? label_text(s->manifest[*row], c) + " (" + match_text(qr, s->manifest[*row], c) + ")"
                                : std::string("-"));
    std::cout << '\n';
  }
}

void cmd_cs_curve(const fs::path& model, const std::string& split, const std::string& thetas, std::string task,
                  const fs::path& out, const GlobalOpts& g) {
  const auto s = open_session(model, g.seed);
  const auto [start, stop, step] = parse_range(thetas);
  EvalOptions opts;
  opts.sampler = s->config.sampler;
  opts.seed = eval_seed(s->seed);
  opts.batch_size = s->config.eval_batch_size;
  opts.threads = g.threads;
  opts.neighbors_from_train = s->config.neighbors_from_train;
  opts.cs_curve_start = start;
  opts.cs_curve_stop = stop;
  opts.cs_curve_step = step;
  const auto report = evaluate(s->bundle.params, s->data, parse_split_flag(split), opts);

  const TaskReport* r = nullptr;
  for (const auto& t : report.tasks)
    if (t.kind == TaskKind::regression && (task.empty() || t.name == task)) {
      r = &t;
      break;
    }
  if (!r) throw Error(task.empty() ? "model has no regression task" : "no regression task named '" + task + "'");

  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw Error("cannot write '" + out.string() + "'");
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "theta,cs\n";
  for (const auto& p : r->cs_curve) {
    char line[64];
    std::snprintf(line, sizeof line, "%g,%.17g\n", p.theta, p.score);
    os << line;
  }
}

void cmd_synth(const fs::path& dir, std::size_t nodes, std::size_t dim, std::size_t visual_dim, const GlobalOpts& g) {
  SyntheticSpec spec;
  spec.nodes = nodes;
  spec.feature_dim = dim;
  spec.visual_dim = visual_dim;
  spec.seed = resolve_seed(g.seed);
  const auto d = make_synthetic(spec);
  fs::create_directories(dir);
  save_manifest(dir / "manifest.jsonl", d.manifest);
  save_features(dir / "features.sgf", d.node_features);
  if (visual_dim) save_features(dir / "visual.sgf", d.visual_features);
  std::cout << "wrote " << nodes << " records to " << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sagenet: graph-based multi-task learning on artwork collections"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed (falls back to SAGENET_SEED, then 0)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  fs::path manifest, out, model, report, store;
  std::string property = "school", split = "test", query, thetas = "0:50:1", task;
  std::size_t max_degree = 128, min_count = 10, k = 5, nodes = 200, dim = 16, visual_dim = 16;
  std::vector<double> fractions{0.85, 0.095, 0.055};
  bool timeframes = false;
  TrainArgs train;

  auto* bg = app.add_subcommand("build-graph", "link records sharing a property value");
  bg->add_option("--manifest", manifest)->required();
  bg->add_option("--property", property);
  bg->add_option("--max-degree", max_degree);
  bg->add_option("--out", out)->required();

  auto* sp = app.add_subcommand("split", "assign train/val/test splits");
  sp->add_option("--manifest", manifest)->required();
  sp->add_option("--fractions", fractions)->delimiter(',');
  sp->add_flag("--timeframes", timeframes, "also derive half-century timeframe labels from dates");
  sp->add_option("--out", out)->required();

  auto* bv = app.add_subcommand("bow-vocab", "build the bag-of-words tag vocabulary");
  bv->add_option("--manifest", manifest)->required();
  bv->add_option("--min-count", min_count);
  bv->add_option("--out", out)->required();

  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--manifest", train.manifest)->required();
  tr->add_option("--graph", train.graph)->required();
  tr->add_option("--features", train.features, "SGF1 node features");
  tr->add_option("--bow", train.bow, "tag vocabulary; node features become bag-of-words");
  tr->add_option("--visual", train.visual, "SGF1 visual features for the fusion branch");
  tr->add_option("--tasks", train.tasks, "comma-separated label names, optionally name:weight");
  tr->add_option("--config", train.config);
  tr->add_option("--out", train.out, "output prefix")->required();
  tr->add_flag("--quiet", train.quiet);

  auto* ev = app.add_subcommand("eval", "evaluate a model on one split");
  ev->add_option("--model", model)->required();
  ev->add_option("--split", split);
  ev->add_option("--report", report);

  auto* em = app.add_subcommand("embed", "write the embedding store");
  em->add_option("--model", model)->required();
  em->add_option("--split", split, "split name or 'all' (default)");
  em->add_option("--out", out)->required();

  auto* rt = app.add_subcommand("retrieve", "nearest neighbors of a record");
  rt->add_option("--model", model)->required();
  rt->add_option("--store", store, "precomputed store; computed from the model otherwise");
  rt->add_option("--split", split, "split searched when no store is given, or 'all'");
  rt->add_option("--query", query)->required();
  rt->add_option("--k", k)->check(CLI::PositiveNumber);

  auto* cs = app.add_subcommand("cs-curve", "cumulative score over a range of thresholds");
  cs->add_option("--model", model)->required();
  cs->add_option("--split", split);
  cs->add_option("--thetas", thetas, "start:stop:step");
  cs->add_option("--task", task, "regression task (first one by default)");
  cs->add_option("--out", out, "CSV path; stdout otherwise");

  auto* sy = app.add_subcommand("synth", "write a synthetic dataset");
  sy->add_option("--out-dir", out)->required();
  sy->add_option("--nodes", nodes);
  sy->add_option("--dim", dim);
  sy->add_option("--visual-dim", visual_dim);

  // Subcommand-local --seed/--threads are accepted too.
  for (auto* sub : {bg, sp, bv, tr, ev, em, rt, cs, sy}) {
    sub->add_option("--seed", g.seed);
    sub->add_option("--threads", g.threads)->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bg) cmd_build_graph(manifest, property, max_degree, out, g);
    else if (*sp) cmd_split(manifest, fractions, timeframes, out, g);
    else if (*bv) cmd_bow_vocab(manifest, min_count, out);
    else if (*tr) cmd_train(train, g);
    else if (*ev) cmd_eval(model, split, report, g);
    else if (*em) cmd_embed(model, em->count("--split") ? split : "all", out, g);
    else if (*rt) cmd_retrieve(model, store, rt->count("--split") ? split : "all", query, k, g);
    else if (*cs) cmd_cs_curve(model, split, thetas, task, out, g);
    else if (*sy) cmd_synth(out, nodes, dim, visual_dim, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
