#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "sagenet/manifest.hpp"
#include "sagenet/tensor.hpp"

namespace sagenet {

/// Dense feature rows keyed by record id, as stored on disk.
struct FeatureMatrix {
  std::vector<std::string> ids;
  nn::Tensor2 data;

  std::size_t dim() const { return data.cols(); }
  std::size_t rows() const { return data.rows(); }
};

/// Features re-indexed by node id of a manifest. Rows without a source row
/// are zero and flagged absent.
class NodeFeatures {
 public:
  NodeFeatures() = default;
  /// Takes ownership of node-aligned data; every row is present.
  NodeFeatures(nn::Tensor2 data, std::vector<std::string> node_ids);

  static NodeFeatures align(const FeatureMatrix& fm, const RecordManifest& manifest, bool allow_missing = false);

  std::size_t dim() const { return data_.cols(); }
  std::size_t node_count() const { return data_.rows(); }
  bool has(NodeId v) const { return v < present_.size() && present_[v]; }
  /// Throws naming the record id when the row is absent.
  void require(NodeId v, const char* what) const;

  const nn::Tensor2& data() const { return data_; }
  /// Rows for `nodes`, in order.
  nn::Tensor2 gather(std::span<const NodeId> nodes, const char* what) const;

 private:
  nn::Tensor2 data_;
  std::vector<char> present_;
  std::vector<std::string> node_ids_;
};

inline constexpr std::string_view kUnknownTag = "Unknown";

/// Tags occurring on more than `min_count` records, sorted, followed by the
/// `Unknown` tag.
std::vector<std::string> build_tag_vocab(const RecordManifest& manifest, std::size_t min_count = 10);

/// Multi-hot rows over `vocab`; records without any vocabulary tag get only
/// the `Unknown` column. `vocab` must end with the `Unknown` tag.
FeatureMatrix bow_features(const RecordManifest& manifest, const std::vector<std::string>& vocab);

}  // namespace sagenet
