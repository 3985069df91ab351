#pragma once

// Random inputs shared by the unit and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "sagenet/graph.hpp"
#include "sagenet/model.hpp"
#include "sagenet/tensor.hpp"
#include "gradcheck.hpp"

namespace fixtures {

using sagenet::NodeId;
using sagenet::Rng;
using sagenet::nn::Tensor2;

inline Tensor2 normal(std::size_t r, std::size_t c, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  Tensor2 t(r, c);
  for (double& v : t.data()) v = d(rng);
  return t;
}

inline std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + sagenet::uniform_index(rng, hi - lo + 1);
}

/// Records with random schools (some missing), artists and splits.
inline sagenet::RecordManifest manifest(std::size_t n, std::size_t schools, std::size_t artists, Rng& rng,
                                        double missing_school = 0.05) {
  static constexpr sagenet::Split kSplits[] = {sagenet::Split::train, sagenet::Split::val, sagenet::Split::test};
  std::vector<sagenet::Record> recs;
  for (std::size_t i = 0; i < n; ++i) {
    sagenet::Record r;
    r.id = "r" + std::to_string(i);
    if (sagenet::uniform_unit(rng) >= missing_school)
      r.properties["school"] = "s" + std::to_string(sagenet::uniform_index(rng, schools));
    r.properties["artist"] = "a" + std::to_string(sagenet::uniform_index(rng, artists));
    r.split = kSplits[sagenet::uniform_index(rng, 3)];
    recs.push_back(std::move(r));
  }
  return sagenet::RecordManifest(std::move(recs));
}

/// Erdos-Renyi graph with edge probability p.
inline sagenet::Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (sagenet::uniform_unit(rng) < p) edges.emplace_back(i, j);
  return sagenet::Graph::from_edges(n, edges);
}

inline std::vector<std::string> artists_of(const sagenet::RecordManifest& m) {
  std::vector<std::string> out;
  for (const auto& r : m.records()) out.push_back(r.properties.count("artist") ? r.properties.at("artist") : "");
  return out;
}

/// A randomized three-task model, batch and labels for end-to-end gradient
/// checks: multiclass (3 classes), regression, multilabel (3 tags), with
/// random task weights and some labels missing.
struct EndToEnd {
  sagenet::RecordManifest manifest;
  sagenet::Graph graph;
  std::vector<std::string> artists;
  sagenet::NodeFeatures feats;
  sagenet::NodeFeatures visual;
  std::vector<sagenet::TaskSpec> tasks;
  std::vector<sagenet::TaskTargets> targets;
  sagenet::ModelParams params;
  std::vector<NodeId> seeds;
  sagenet::SampledBlock block;

  double loss() const {
    auto pass = sagenet::forward(params, feats, &visual, block);
    return sagenet::multitask_loss(pass.outputs, targets, seeds, tasks).total;
  }

  /// Activation pattern of every non-smooth point: inner-layer and visual
  /// ReLU inputs and the regression residual signs.
  std::vector<char> kinks() const {
    auto pass = sagenet::forward(params, feats, &visual, block);
    std::vector<char> sig;
    for (std::size_t l = 0; l + 1 < pass.encoder.steps.size(); ++l)
      for (const auto& step : pass.encoder.steps[l])
        for (double v : step.pre.data()) sig.push_back(v > 0);
    for (double v : pass.visual_pre.data()) sig.push_back(v > 0);
    for (std::size_t k = 0; k < seeds.size(); ++k)
      if (targets[1].has(seeds[k])) sig.push_back(pass.outputs[1](k, 0) > targets[1].value[seeds[k]]);
    return sig;
  }
};

inline EndToEnd make_end_to_end(sagenet::Seed seed, bool l2_normalize) {
  Rng rng(seed);
  EndToEnd e;
  const std::size_t n = between(rng, 8, 16);
  e.manifest = manifest(n, 3, 4, rng);
  e.graph = random_graph(n, 0.35, rng);
  e.artists = artists_of(e.manifest);

  std::vector<std::string> ids;
  for (const auto& r : e.manifest.records()) ids.push_back(r.id);
  const std::size_t in_dim = between(rng, 2, 5), vis_dim = between(rng, 2, 4);
  e.feats = sagenet::NodeFeatures(normal(n, in_dim, rng), ids);
  e.visual = sagenet::NodeFeatures(normal(n, vis_dim, rng), ids);

  std::uniform_real_distribution<double> weight(0.2, 2.0);
  e.tasks = {{"style", sagenet::TaskKind::multiclass, 3, weight(rng), {"x", "y", "z"}},
             {"date", sagenet::TaskKind::regression, 1, weight(rng), {}},
             {"tags", sagenet::TaskKind::multilabel, 3, weight(rng), {"t0", "t1", "t2"}}};
  for (const auto& t : e.tasks) {
    sagenet::TaskTargets tt;
    tt.kind = t.kind;
    tt.present.assign(n, 0);
    tt.cls.assign(n, 0);
    tt.value.assign(n, 0.0);
    tt.multi = Tensor2(n, t.output_dim);
    for (std::size_t v = 0; v < n; ++v) {
      tt.present[v] = sagenet::uniform_unit(rng) < 0.85;
      tt.cls[v] = static_cast<int>(sagenet::uniform_index(rng, 3));
      tt.value[v] = 2.0 * (sagenet::uniform_unit(rng) - 0.5);
      for (std::size_t k = 0; k < t.output_dim; ++k) tt.multi(v, k) = sagenet::uniform_unit(rng) < 0.4;
    }
    e.targets.push_back(std::move(tt));
  }

  sagenet::ModelConfig cfg;
  cfg.input_dim = in_dim;
  cfg.visual_dim = vis_dim;
  cfg.hidden_dim = between(rng, 2, 5);
  cfg.proj_dim = between(rng, 2, 4);
  cfg.depth = 2;
  cfg.l2_normalize = l2_normalize;
  e.params = sagenet::ModelParams::init(cfg, e.tasks, seed);
  for (auto* t : e.params.tensors()) t->value = normal(t->rows(), t->cols(), rng, 0.7);

  const std::size_t batch = between(rng, 2, 5);
  for (std::size_t i = 0; i < batch; ++i) e.seeds.push_back(static_cast<NodeId>(sagenet::uniform_index(rng, n)));
  sagenet::SamplerOptions opts;
  opts.fanouts = {between(rng, 2, 4), between(rng, 1, 3)};
  opts.mask_same_artist_hop1 = sagenet::uniform_unit(rng) < 0.5;
  e.block = sagenet::sample_neighborhood(e.graph, e.seeds, opts, e.artists, seed);
  return e;
}

struct GradReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose +-eps interval crosses a kink
};

/// Compares backward() with central differences on every parameter entry.
inline GradReport check_end_to_end(EndToEnd& e, double eps = gradcheck::kEps) {
  auto pass = sagenet::forward(e.params, e.feats, &e.visual, e.block);
  auto loss = sagenet::multitask_loss(pass.outputs, e.targets, e.seeds, e.tasks);
  e.params.zero_grad();
  sagenet::backward(e.params, pass, e.block, loss.grads);

  GradReport rep;
  const auto base = e.kinks();
  for (auto* t : e.params.tensors()) {
    for (std::size_t i = 0; i < t->value.size(); ++i) {
      double& w = t->value.data()[i];
      const double saved = w;
      w = saved + eps;
      const double up = e.loss();
      const bool smooth_up = e.kinks() == base;
      w = saved - eps;
      const double down = e.loss();
      const bool smooth_down = e.kinks() == base;
      w = saved;
      if (!smooth_up || !smooth_down) {
        ++rep.skipped;
        continue;
      }
      const double numeric = (up - down) / (2 * eps);
      rep.max_rel_error = std::max(rep.max_rel_error, gradcheck::rel_error(t->grad.data()[i], numeric));
      ++rep.checked;
    }
  }
  return rep;
}

}  // namespace fixtures
