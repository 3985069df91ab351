#include "sagenet/model.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sagenet {

using nn::ParamTensor;
using nn::Tensor2;

TaskKind parse_task_kind(std::string_view s) {
  if (s == "multiclass") return TaskKind::multiclass;
  if (s == "regression") return TaskKind::regression;
  if (s == "multilabel") return TaskKind::multilabel;
  throw Error("unknown task kind '" + std::string(s) + "'");
}

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::multiclass: return "multiclass";
    case TaskKind::regression: return "regression";
    case TaskKind::multilabel: return "multilabel";
  }
  return "multiclass";
}

void TaskSpec::validate() const {
  if (!(weight > 0.0)) throw Error("task '" + name + "' must have a positive weight");
  if (output_dim < 1) throw Error("task '" + name + "' must have output_dim >= 1");
  if (kind == TaskKind::regression && output_dim != 1)
    throw Error("regression task '" + name + "' must have output_dim 1");
  if (kind != TaskKind::regression && classes.size() != output_dim)
    throw Error("task '" + name + "' class list does not match output_dim");
}

TaskSpec infer_task(const RecordManifest& manifest, const std::string& name, double weight) {
  std::optional<std::size_t> kind_index;
  std::set<std::string> classes;
  for (const auto& r : manifest.records()) {
    const Label* l = r.label(name);
    if (!l) continue;
    if (kind_index && *kind_index != l->index())
      throw Error("task '" + name + "' mixes label types (record '" + r.id + "')");
    kind_index = l->index();
    if (auto* s = std::get_if<std::string>(l)) classes.insert(*s);
    if (auto* tags = std::get_if<std::vector<std::string>>(l)) classes.insert(tags->begin(), tags->end());
  }
  if (!kind_index) throw Error("no record carries a label for task '" + name + "'");

  TaskSpec t;
  t.name = name;
  t.weight = weight;
  t.kind = *kind_index == 0 ? TaskKind::multiclass : (*kind_index == 1 ? TaskKind::regression : TaskKind::multilabel);
  t.classes.assign(classes.begin(), classes.end());
  t.output_dim = t.kind == TaskKind::regression ? 1 : t.classes.size();
  t.validate();
  return t;
}

TaskTargets build_targets(const RecordManifest& manifest, const TaskSpec& task) {
  const std::size_t n = manifest.size();
  TaskTargets tt;
  tt.kind = task.kind;
  tt.present.assign(n, 0);
  std::map<std::string_view, int> index;
  for (std::size_t c = 0; c < task.classes.size(); ++c) index.emplace(task.classes[c], static_cast<int>(c));

  switch (task.kind) {
    case TaskKind::multiclass: tt.cls.assign(n, -1); break;
    case TaskKind::regression: tt.value.assign(n, 0.0); break;
    case TaskKind::multilabel: tt.multi = Tensor2(n, task.output_dim); break;
  }

  for (NodeId v = 0; v < n; ++v) {
    const Label* l = manifest[v].label(task.name);
    if (!l) continue;
    const auto& id = manifest[v].id;
    switch (task.kind) {
      case TaskKind::multiclass: {
        auto* s = std::get_if<std::string>(l);
        if (!s) throw Error("record '" + id + "': task '" + task.name + "' expects a class name");
        auto it = index.find(*s);
        if (it == index.end())
          throw Error("record '" + id + "': unknown class '" + *s + "' for task '" + task.name + "'");
        tt.cls[v] = it->second;
        break;
      }
      case TaskKind::regression: {
        auto* d = std::get_if<double>(l);
        if (!d) throw Error("record '" + id + "': task '" + task.name + "' expects a number");
        tt.value[v] = *d;
        break;
      }
      case TaskKind::multilabel: {
        auto* tags = std::get_if<std::vector<std::string>>(l);
        if (!tags) throw Error("record '" + id + "': task '" + task.name + "' expects a tag list");
        for (const auto& t : *tags) {
          auto it = index.find(t);
          if (it != index.end()) tt.multi(v, static_cast<std::size_t>(it->second)) = 1.0;
        }
        break;
      }
    }
    tt.present[v] = 1;
  }
  return tt;
}

ModelParams ModelParams::init(const ModelConfig& config, std::span<const TaskSpec> tasks, Seed seed) {
  if (config.input_dim == 0) throw Error("model input_dim must be positive");
  if (config.hidden_dim == 0 || config.depth == 0) throw Error("model hidden_dim and depth must be positive");
  if (config.visual_dim && config.proj_dim == 0) throw Error("model proj_dim must be positive with a visual branch");

  Rng rng(seed);
  ModelParams p;
  p.config = config;
  for (std::size_t l = 0; l < config.depth; ++l) {
    const std::size_t in = l == 0 ? config.input_dim : config.hidden_dim;
    SageLayer layer;
    layer.w_self = ParamTensor(nn::glorot_uniform(config.hidden_dim, in, rng));
    layer.w_neigh = ParamTensor(nn::glorot_uniform(config.hidden_dim, in, rng));
    layer.bias = ParamTensor(1, config.hidden_dim);
    p.sage.push_back(std::move(layer));
  }
  if (config.visual_dim) {
    p.proj_w = ParamTensor(nn::glorot_uniform(config.proj_dim, config.visual_dim, rng));
    p.proj_b = ParamTensor(1, config.proj_dim);
  }
  for (const auto& t : tasks) {
    t.validate();
    TaskHead h;
    h.w = ParamTensor(nn::glorot_uniform(t.output_dim, config.embedding_dim(), rng));
    h.b = ParamTensor(1, t.output_dim);
    p.heads.push_back(std::move(h));
  }
  return p;
}

std::vector<ParamTensor*> ModelParams::tensors() {
  std::vector<ParamTensor*> out;
  for (auto& l : sage) {
    out.push_back(&l.w_self);
    out.push_back(&l.w_neigh);
    out.push_back(&l.bias);
  }
  if (config.visual_dim) {
    out.push_back(&proj_w);
    out.push_back(&proj_b);
  }
  for (auto& h : heads) {
    out.push_back(&h.w);
    out.push_back(&h.b);
  }
  return out;
}

std::vector<const ParamTensor*> ModelParams::tensors() const {
  auto mut = const_cast<ModelParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) n += t->value.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto* t : tensors()) t->zero_grad();
}

bool ModelParams::all_finite() const {
  for (const auto* t : tensors())
    if (!t->value.all_finite()) return false;
  return true;
}

EncoderPass encode_pass(const ModelParams& params, const NodeFeatures& feats, const SampledBlock& block) {
  const auto& cfg = params.config;
  const std::size_t depth = cfg.depth;
  if (block.depth() != depth)
    throw Error("sampled block has " + std::to_string(block.depth()) + " hops but the encoder has " +
                std::to_string(depth) + " layers");
  if (feats.dim() != cfg.input_dim)
    throw Error("node feature dim " + std::to_string(feats.dim()) + " does not match encoder input dim " +
                std::to_string(cfg.input_dim));

  EncoderPass pass;
  pass.reps.resize(depth + 1);
  pass.steps.resize(depth);
  for (std::size_t d = 0; d <= depth; ++d) pass.reps[0].push_back(feats.gather(block.level(d), "node feature"));

  for (std::size_t l = 1; l <= depth; ++l) {
    const SageLayer& layer = params.sage[l - 1];
    const bool last = l == depth;
    for (std::size_t d = 0; d + l <= depth; ++d) {
      SageStep step;
      step.agg = nn::mean_aggregate(pass.reps[l - 1][d + 1], block.hops[d]);
      step.pre = nn::linear(pass.reps[l - 1][d], layer.w_self, layer.bias);
      step.pre += nn::linear(step.agg, layer.w_neigh);
      step.act = last ? step.pre : nn::relu(step.pre);
      pass.reps[l].push_back(cfg.l2_normalize ? nn::l2_normalize_rows(step.act) : step.act);
      pass.steps[l - 1].push_back(std::move(step));
    }
  }
  return pass;
}

Tensor2 encode(const ModelParams& params, const NodeFeatures& feats, const SampledBlock& block) {
  return encode_pass(params, feats, block).output();
}

ForwardPass forward(const ModelParams& params, const NodeFeatures& feats, const NodeFeatures* visual,
                    const SampledBlock& block) {
  ForwardPass out;
  out.encoder = encode_pass(params, feats, block);
  const auto& cfg = params.config;
  if (cfg.visual_dim) {
    if (!visual) throw Error("model has a visual branch but no visual features were supplied");
    if (visual->dim() != cfg.visual_dim)
      throw Error("visual feature dim " + std::to_string(visual->dim()) + " does not match model visual dim " +
                  std::to_string(cfg.visual_dim));
    out.visual_in = visual->gather(block.level(0), "visual feature");
    out.visual_pre = nn::linear(out.visual_in, params.proj_w, params.proj_b);
    out.embedding = nn::concat(nn::relu(out.visual_pre), out.encoder.output());
  } else {
    out.embedding = out.encoder.output();
  }
  for (const auto& h : params.heads) out.outputs.push_back(nn::linear(out.embedding, h.w, h.b));
  return out;
}

namespace {

void encoder_backward(ModelParams& params, const EncoderPass& pass, const SampledBlock& block, Tensor2 d_out) {
  const std::size_t depth = params.config.depth;
  // grads[d] holds d loss / d reps[l][d] for the layer being processed.
  std::vector<Tensor2> grads(1);
  grads[0] = std::move(d_out);
  for (std::size_t l = depth; l >= 1; --l) {
    SageLayer& layer = params.sage[l - 1];
    const bool last = l == depth;
    std::vector<Tensor2> lower;
    if (l > 1) {
      for (std::size_t d = 0; d + l - 1 <= depth; ++d)
        lower.emplace_back(pass.reps[l - 1][d].rows(), pass.reps[l - 1][d].cols());
    }
    for (std::size_t d = 0; d + l <= depth; ++d) {
      const SageStep& step = pass.steps[l - 1][d];
      Tensor2 g = std::move(grads[d]);
      if (params.config.l2_normalize) g = nn::l2_normalize_rows_backward(step.act, g);
      if (!last) g = nn::relu_backward(step.pre, g);
      if (l > 1) {
        lower[d] += nn::linear_backward(pass.reps[l - 1][d], g, layer.w_self, &layer.bias);
        Tensor2 d_agg = nn::linear_backward(step.agg, g, layer.w_neigh);
        lower[d + 1] += nn::mean_aggregate_backward(d_agg, block.hops[d], pass.reps[l - 1][d + 1].rows());
      } else {
        nn::linear_backward_params(pass.reps[0][d], g, layer.w_self, &layer.bias);
        nn::linear_backward_params(step.agg, g, layer.w_neigh);
      }
    }
    grads = std::move(lower);
  }
}

}  // namespace

void backward(ModelParams& params, const ForwardPass& pass, const SampledBlock& block,
              std::span<const Tensor2> d_outputs) {
  if (d_outputs.size() != params.heads.size()) throw Error("backward: one output gradient per head expected");
  Tensor2 d_emb(pass.embedding.rows(), pass.embedding.cols());
  for (std::size_t t = 0; t < params.heads.size(); ++t)
    d_emb += nn::linear_backward(pass.embedding, d_outputs[t], params.heads[t].w, &params.heads[t].b);

  const auto& cfg = params.config;
  if (cfg.visual_dim) {
    auto [d_vis, d_graph] = nn::concat_backward(d_emb, cfg.proj_dim);
    Tensor2 d_pre = nn::relu_backward(pass.visual_pre, d_vis);
    nn::linear_backward_params(pass.visual_in, d_pre, params.proj_w, &params.proj_b);
    encoder_backward(params, pass.encoder, block, std::move(d_graph));
  } else {
    encoder_backward(params, pass.encoder, block, std::move(d_emb));
  }
}

MultitaskLoss multitask_loss(std::span<const Tensor2> outputs, std::span<const TaskTargets> targets,
                             std::span<const NodeId> seeds, std::span<const TaskSpec> tasks) {
  if (outputs.size() != tasks.size() || targets.size() != tasks.size())
    throw Error("multitask_loss: outputs, targets and tasks must align");
  MultitaskLoss out;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    const auto& tt = targets[t];
    const Tensor2& y = outputs[t];
    if (y.rows() != seeds.size() || y.cols() != task.output_dim)
      throw Error("multitask_loss: output shape mismatch for task '" + task.name + "'");

    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < seeds.size(); ++k)
      if (tt.has(seeds[k])) rows.push_back(k);

    nn::LossResult r{0.0, Tensor2(rows.size(), task.output_dim)};
    if (!rows.empty()) {
      Tensor2 sub = nn::gather_rows(y, rows);
      switch (task.kind) {
        case TaskKind::multiclass: {
          std::vector<int> labels;
          for (auto k : rows) labels.push_back(tt.cls[seeds[k]]);
          r = nn::softmax_cross_entropy(sub, labels);
          break;
        }
        case TaskKind::regression: {
          std::vector<double> target;
          for (auto k : rows) target.push_back(tt.value[seeds[k]]);
          r = nn::mae_loss(sub, target);
          break;
        }
        case TaskKind::multilabel: {
          std::vector<std::size_t> nodes;
          for (auto k : rows) nodes.push_back(seeds[k]);
          r = nn::bce_with_logits(sub, nn::gather_rows(tt.multi, nodes));
          break;
        }
      }
    }
    for (double& g : r.grad.data()) g *= task.weight;
    out.total += task.weight * r.loss;
    out.per_task.push_back(r.loss);
    out.counts.push_back(rows.size());
    out.grads.push_back(nn::scatter_rows(r.grad, rows, seeds.size()));
  }
  return out;
}

}  // namespace sagenet
