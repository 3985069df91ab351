#include "sagenet/synthetic.hpp"

#include <random>

namespace sagenet {

namespace {

std::vector<std::vector<double>> prototypes(std::size_t classes, std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> p(classes, std::vector<double>(dim));
  for (auto& row : p)
    for (double& v : row) v = normal(rng);
  return p;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.nodes == 0 || spec.schools == 0 || spec.classes == 0 || spec.feature_dim == 0)
    throw Error("synthetic spec needs positive sizes");
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto node_protos = prototypes(spec.classes, spec.feature_dim, rng);
  const auto visual_protos = prototypes(spec.classes, std::max<std::size_t>(spec.visual_dim, 1), rng);

  SyntheticData out;
  out.node_features.data = nn::Tensor2(spec.nodes, spec.feature_dim);
  out.visual_features.data = nn::Tensor2(spec.nodes, spec.visual_dim);
  std::vector<Record> records;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    const std::size_t school = i % spec.schools;
    const std::size_t cls = uniform_unit(rng) < spec.school_affinity ? school % spec.classes
                                                                     : uniform_index(rng, spec.classes);
    Record r;
    r.id = "n" + std::to_string(i);
    r.properties["school"] = "school" + std::to_string(school);
    r.properties["artist"] =
        "artist" + std::to_string(school) + "_" + std::to_string(uniform_index(rng, spec.artists_per_school));
    r.labels["style"] = "style" + std::to_string(cls);

    double z0 = 0.0;
    for (std::size_t k = 0; k < spec.feature_dim; ++k) {
      const double z = normal(rng);
      if (k == 0) z0 = z;
      out.node_features.data(i, k) = node_protos[cls][k] + spec.noise_sigma * z;
    }
    for (std::size_t k = 0; k < spec.visual_dim; ++k)
      out.visual_features.data(i, k) = visual_protos[cls][k] + spec.noise_sigma * normal(rng);
    r.labels["date"] = 1850.0 + 10.0 * static_cast<double>(cls) + 2.0 * z0;

    std::vector<std::string> tags;
    if (cls % 2 == 0) tags.emplace_back("t0");
    if (cls == 1 || cls == 2) tags.emplace_back("t1");
    if (cls + 1 == spec.classes) tags.emplace_back("t2");
    r.labels["tags"] = tags;
    r.tags = tags;

    out.node_features.ids.push_back(r.id);
    out.visual_features.ids.push_back(r.id);
    records.push_back(std::move(r));
  }
  out.manifest = RecordManifest(std::move(records));
  apply_splits(out.manifest, make_splits(out.manifest, spec.fractions, derive_seed(spec.seed, 0x5B1)));
  return out;
}

}  // namespace sagenet
