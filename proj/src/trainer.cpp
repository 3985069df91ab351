#include "sagenet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>

#include "sagenet/schedule.hpp"

namespace sagenet {

using nlohmann::json;

void TrainData::validate() const {
  if (!manifest || !graph || !feats) throw Error("training data is incomplete");
  if (graph->node_count() != manifest->size()) throw Error("graph and manifest sizes differ");
  if (feats->node_count() != manifest->size()) throw Error("node features do not cover the manifest");
  if (targets.size() != tasks.size()) throw Error("one target set per task expected");
  if (tasks.empty()) throw Error("at least one task is required");
}

TrainData make_train_data(const RecordManifest& manifest, const Graph& graph, const NodeFeatures& feats,
                          const NodeFeatures* visual, std::vector<TaskSpec> tasks,
                          const std::string& artist_property) {
  TrainData d;
  d.manifest = &manifest;
  d.graph = &graph;
  d.feats = &feats;
  d.visual = visual;
  d.tasks = std::move(tasks);
  for (const auto& t : d.tasks) d.targets.push_back(build_targets(manifest, t));
  d.artists.reserve(manifest.size());
  for (const auto& r : manifest.records()) {
    auto it = r.properties.find(artist_property);
    d.artists.push_back(it == r.properties.end() ? std::string() : it->second);
  }
  d.validate();
  return d;
}

double TaskReport::headline() const {
  switch (kind) {
    case TaskKind::multiclass: return accuracy;
    case TaskKind::regression: return mae;
    case TaskKind::multilabel: return map;
  }
  return 0.0;
}

std::string TaskReport::headline_name() const {
  switch (kind) {
    case TaskKind::multiclass: return name + "_acc";
    case TaskKind::regression: return name + "_mae";
    case TaskKind::multilabel: return name + "_map";
  }
  return name;
}

json EvalReport::to_json(std::span<const TaskSpec> specs) const {
  json j;
  j["split"] = split;
  j["nodes"] = node_count;
  j["total_loss"] = total_loss;
  j["tasks"] = json::array();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& r = tasks[t];
    json tj{{"name", r.name}, {"kind", std::string(task_kind_name(r.kind))}, {"count", r.count}, {"loss", r.loss}};
    switch (r.kind) {
      case TaskKind::multiclass: tj["accuracy_percent"] = r.accuracy; break;
      case TaskKind::regression: {
        tj["mae"] = r.mae;
        tj["cumulative_score_percent"] = r.cumulative_score;
        json curve = json::array();
        for (const auto& p : r.cs_curve) curve.push_back({{"theta", p.theta}, {"cs", p.score}});
        tj["cs_curve"] = curve;
        break;
      }
      case TaskKind::multilabel: {
        tj["cf1"] = r.cf1;
        tj["of1"] = r.of1;
        tj["map"] = r.map;
        json f1 = json::object();
        for (std::size_t k = 0; k < r.per_class_f1.size(); ++k) {
          const std::string cls = t < specs.size() && k < specs[t].classes.size() ? specs[t].classes[k]
                                                                                  : std::to_string(k);
          f1[cls] = r.per_class_f1[k];
        }
        tj["per_class_f1"] = f1;
        break;
      }
    }
    j["tasks"].push_back(tj);
  }
  return j;
}

Graph inference_view(const TrainData& data, Split split, bool neighbors_from_train) {
  if (neighbors_from_train && split != Split::train) {
    const Split allowed[] = {split, Split::train};
    return split_view(*data.graph, *data.manifest, allowed);
  }
  return split_view(*data.graph, *data.manifest, split);
}

EvalReport evaluate(const ModelParams& params, const TrainData& data, Split split, const EvalOptions& options) {
  return evaluate(params, data, inference_view(data, split, options.neighbors_from_train), split, options);
}

EvalReport evaluate(const ModelParams& params, const TrainData& data, const Graph& view, Split split,
                    const EvalOptions& options) {
  data.validate();
  const auto nodes = data.manifest->nodes_in(split);
  EvalReport report;
  report.split = std::string(split_name(split));
  report.node_count = nodes.size();
  if (nodes.empty()) throw Error("split '" + report.split + "' has no records");

  InferenceContext ctx;
  ctx.params = &params;
  ctx.graph = &view;
  ctx.feats = data.feats;
  ctx.visual = data.visual;
  ctx.sampler = options.sampler;
  ctx.artists = data.artists;
  ctx.seed = options.seed;
  ctx.batch_size = options.batch_size;
  ctx.threads = options.threads;
  auto result = run_inference(ctx, nodes);

  auto loss = multitask_loss(result.outputs, data.targets, nodes, data.tasks);
  report.total_loss = loss.total;

  for (std::size_t t = 0; t < data.tasks.size(); ++t) {
    const auto& task = data.tasks[t];
    const auto& tt = data.targets[t];
    const auto& out = result.outputs[t];
    TaskReport r;
    r.name = task.name;
    r.kind = task.kind;
    r.count = loss.counts[t];
    r.loss = loss.per_task[t];
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (tt.has(nodes[k])) rows.push_back(k);
    if (!rows.empty()) {
      switch (task.kind) {
        case TaskKind::multiclass: {
          std::vector<int> pred, truth;
          for (auto k : rows) {
            auto row = out.row(k);
            pred.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
            truth.push_back(tt.cls[nodes[k]]);
          }
          r.accuracy = metrics::accuracy(pred, truth);
          break;
        }
        case TaskKind::regression: {
          std::vector<double> pred, truth;
          for (auto k : rows) {
            pred.push_back(out(k, 0));
            truth.push_back(tt.value[nodes[k]]);
            r.abs_errors.push_back(std::abs(pred.back() - truth.back()));
          }
          r.mae = metrics::mean_absolute_error(pred, truth);
          r.cumulative_score = metrics::cumulative_score(r.abs_errors, options.cs_theta, options.cs_strict);
          r.cs_curve = metrics::cumulative_score_curve(r.abs_errors, options.cs_curve_start, options.cs_curve_stop,
                                                       options.cs_curve_step, options.cs_strict);
          break;
        }
        case TaskKind::multilabel: {
          nn::Tensor2 scores = nn::gather_rows(out, rows);
          for (double& s : scores.data()) s = nn::sigmoid(s);
          std::vector<std::size_t> node_rows;
          for (auto k : rows) node_rows.push_back(nodes[k]);
          nn::Tensor2 truth = nn::gather_rows(tt.multi, node_rows);
          auto f1 = metrics::cf1_of1(scores, truth, options.tag_threshold);
          r.cf1 = f1.cf1;
          r.of1 = f1.of1;
          r.per_class_f1 = f1.per_class;
          r.map = metrics::mean_average_precision(scores, truth);
          break;
        }
      }
    }
    report.tasks.push_back(std::move(r));
  }
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string loss_breakdown(const MultitaskLoss& loss, std::span<const TaskSpec> tasks) {
  std::string s;
  for (std::size_t t = 0; t < tasks.size(); ++t)
    s += " " + tasks[t].name + "=" + fmt_double(loss.per_task[t]) + " (n=" + std::to_string(loss.counts[t]) + ")";
  return s;
}

}  // namespace

void TrainLog::write_csv(std::ostream& os) const {
  os << "epoch,train_loss,val_loss,lr";
  if (!epochs.empty())
    for (const auto& [name, v] : epochs.front().val_metrics) os << ',' << name;
  os << '\n';
  for (const auto& e : epochs) {
    os << e.epoch << ',' << fmt_double(e.train_loss) << ',' << fmt_double(e.val_loss) << ',' << fmt_double(e.lr);
    for (const auto& [name, v] : e.val_metrics) os << ',' << fmt_double(v);
    os << '\n';
  }
}

FitResult fit(ModelParams params, const TrainData& data, const TrainOptions& options) {
  data.validate();
  options.optim.validate();
  const auto& manifest = *data.manifest;
  const auto train_nodes = manifest.nodes_in(Split::train);
  if (train_nodes.empty()) throw Error("training split is empty");
  if (manifest.nodes_in(Split::val).empty()) throw Error("validation split is empty");
  if (params.heads.size() != data.tasks.size()) throw Error("model heads do not match the task list");

  if (options.init_regression_bias) {
    for (std::size_t t = 0; t < data.tasks.size(); ++t) {
      if (data.tasks[t].kind != TaskKind::regression) continue;
      std::vector<double> ys;
      for (NodeId v : train_nodes)
        if (data.targets[t].has(v)) ys.push_back(data.targets[t].value[v]);
      if (!ys.empty()) params.heads[t].b.value(0, 0) = median(std::move(ys));
    }
  }

  const Graph train_view = split_view(*data.graph, manifest, Split::train);
  const Graph val_view = inference_view(data, Split::val, options.neighbors_from_train);
  EvalOptions eval_opts;
  eval_opts.sampler = options.sampler;
  eval_opts.seed = derive_seed(options.seed, 0xE7A1);
  eval_opts.batch_size = options.eval_batch_size;
  eval_opts.threads = options.threads;
  eval_opts.neighbors_from_train = options.neighbors_from_train;

  const auto& oc = options.optim;
  Optimizer optimizer(oc);
  PlateauScheduler scheduler(oc.lr, oc.plateau.factor, oc.plateau.patience);
  EarlyStopper stopper(oc.early_stop_patience);
  double lr = oc.lr;

  FitResult result;
  result.params = params;
  auto tensors = params.tensors();
  std::vector<NodeId> order = train_nodes;
  const std::size_t batches = (order.size() + oc.batch_size - 1) / oc.batch_size;

  for (std::size_t epoch = 1; epoch <= oc.max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(options.seed, 0x5EED, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

    auto sample_batch = [&](std::size_t b) {
      const std::size_t lo = b * oc.batch_size;
      const std::size_t hi = std::min(order.size(), lo + oc.batch_size);
      std::span<const NodeId> seeds(order.data() + lo, hi - lo);
      return sample_neighborhood(train_view, seeds, options.sampler, data.artists,
                                 derive_seed(options.seed, epoch, b));
    };

    double train_loss = 0.0;
    std::future<SampledBlock> pending;
    if (options.threads > 1) pending = std::async(std::launch::async, sample_batch, 0);
    for (std::size_t b = 0; b < batches; ++b) {
      SampledBlock block = options.threads > 1 ? pending.get() : sample_batch(b);
      if (options.threads > 1 && b + 1 < batches) pending = std::async(std::launch::async, sample_batch, b + 1);

      const auto seeds = block.level(0);
      auto pass = forward(params, *data.feats, data.visual, block);
      auto loss = multitask_loss(pass.outputs, data.targets, seeds, data.tasks);
      if (!std::isfinite(loss.total))
        throw Error("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) +
                    ", lr " + fmt_double(lr) + ":" + loss_breakdown(loss, data.tasks));
      backward(params, pass, block, loss.grads);
      optimizer.step(tensors, lr);
      train_loss += loss.total * static_cast<double>(seeds.size());
    }
    train_loss /= static_cast<double>(order.size());

    auto report = evaluate(params, data, val_view, Split::val, eval_opts);
    if (!std::isfinite(report.total_loss))
      throw Error("non-finite validation loss at epoch " + std::to_string(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_loss;
    rec.val_loss = report.total_loss;
    rec.lr = lr;
    for (const auto& t : report.tasks) rec.val_metrics.emplace_back(t.headline_name(), t.headline());
    result.log.epochs.push_back(rec);

    const bool stop = stopper.observe(report.total_loss);
    if (stopper.improved_last()) {
      result.params = params;
      result.best_epoch = epoch;
      result.best_val_loss = report.total_loss;
    }
    if (options.progress) {
      *options.progress << "epoch " << epoch << " train_loss " << fmt_double(train_loss) << " val_loss "
                        << fmt_double(report.total_loss) << " lr " << fmt_double(lr);
      for (const auto& [name, v] : rec.val_metrics) *options.progress << ' ' << name << ' ' << v;
      *options.progress << '\n';
    }
    if (oc.plateau.enabled) lr = scheduler.observe(report.total_loss);
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }

  result.params.zero_grad();
  for (auto* t : result.params.tensors()) t->reset_state();
  return result;
}

}  // namespace sagenet
