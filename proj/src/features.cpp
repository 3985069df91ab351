#include "sagenet/features.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sagenet {

NodeFeatures::NodeFeatures(nn::Tensor2 data, std::vector<std::string> node_ids)
    : data_(std::move(data)), present_(data_.rows(), 1), node_ids_(std::move(node_ids)) {
  if (node_ids_.size() != data_.rows()) throw Error("node id list does not match feature rows");
}

NodeFeatures NodeFeatures::align(const FeatureMatrix& fm, const RecordManifest& manifest, bool allow_missing) {
  if (fm.ids.size() != fm.rows()) throw Error("feature id list does not match row count");
  NodeFeatures out;
  out.data_ = nn::Tensor2(manifest.size(), fm.dim());
  out.present_.assign(manifest.size(), 0);
  out.node_ids_.reserve(manifest.size());
  for (const auto& r : manifest.records()) out.node_ids_.push_back(r.id);

  for (std::size_t row = 0; row < fm.rows(); ++row) {
    auto node = manifest.find(fm.ids[row]);
    if (!node) continue;
    if (out.present_[*node]) throw Error("duplicate feature row for id '" + fm.ids[row] + "'");
    std::copy(fm.data.row(row).begin(), fm.data.row(row).end(), out.data_.row(*node).begin());
    out.present_[*node] = 1;
  }
  if (!allow_missing)
    for (NodeId v = 0; v < manifest.size(); ++v) out.require(v, "features");
  return out;
}

void NodeFeatures::require(NodeId v, const char* what) const {
  if (has(v)) return;
  const std::string id = v < node_ids_.size() ? node_ids_[v] : std::to_string(v);
  throw Error(std::string("missing ") + what + " row for node '" + id + "'");
}

nn::Tensor2 NodeFeatures::gather(std::span<const NodeId> nodes, const char* what) const {
  nn::Tensor2 out(nodes.size(), dim());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    require(nodes[k], what);
    auto src = data_.row(nodes[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

std::vector<std::string> build_tag_vocab(const RecordManifest& manifest, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : manifest.records()) {
    std::set<std::string> unique(r.tags.begin(), r.tags.end());
    for (const auto& t : unique)
      if (t != kUnknownTag) ++counts[t];
  }
  std::vector<std::string> vocab;
  for (const auto& [tag, c] : counts)
    if (c > min_count) vocab.push_back(tag);
  vocab.emplace_back(kUnknownTag);
  return vocab;
}

FeatureMatrix bow_features(const RecordManifest& manifest, const std::vector<std::string>& vocab) {
  if (vocab.empty() || vocab.back() != kUnknownTag)
    throw Error("tag vocabulary must end with the Unknown tag");
  std::map<std::string_view, std::size_t> column;
  for (std::size_t c = 0; c < vocab.size(); ++c) column.emplace(vocab[c], c);
  const std::size_t unknown = vocab.size() - 1;

  FeatureMatrix fm;
  fm.data = nn::Tensor2(manifest.size(), vocab.size());
  for (NodeId v = 0; v < manifest.size(); ++v) {
    const auto& r = manifest[v];
    fm.ids.push_back(r.id);
    bool any = false;
    for (const auto& t : r.tags) {
      auto it = column.find(t);
      if (it == column.end() || it->second == unknown) continue;
      fm.data(v, it->second) = 1.0;
      any = true;
    }
    if (!any) fm.data(v, unknown) = 1.0;
  }
  return fm;
}

}  // namespace sagenet
