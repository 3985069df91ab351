#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sagenet/inference.hpp"

namespace sagenet {

/// Embedding rows keyed by record id.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::vector<std::string> ids, nn::Tensor2 matrix);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return matrix_.cols(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const nn::Tensor2& matrix() const { return matrix_; }
  std::optional<std::size_t> row_of(const std::string& id) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.ids_ == b.ids_ && a.matrix_ == b.matrix_;
  }

 private:
  std::vector<std::string> ids_;
  nn::Tensor2 matrix_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Fused embeddings for `nodes` (ascending node order is preserved).
EmbeddingStore embed_all(const InferenceContext& ctx, const RecordManifest& manifest, std::span<const NodeId> nodes);

struct Neighbor {
  std::string id;
  double distance;  // 1 - cosine similarity
};

/// Cosine distance between two rows; 1 when either has zero norm.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// The k nearest rows to the query by cosine distance, excluding the query
/// itself, sorted by (distance, id).
std::vector<Neighbor> knn(const EmbeddingStore& store, const std::string& query_id, std::size_t k = 5);

inline constexpr std::string_view kStoreMagic = "SGE1";

// Store file: magic "SGE1", u64 rows, u64 dim, row-major little-endian f64;
// the ids go to a JSON array in `<path>.ids.json`.
void save_store(const std::filesystem::path& path, const EmbeddingStore& store);
EmbeddingStore load_store(const std::filesystem::path& path);
void write_store_matrix(std::ostream& os, const nn::Tensor2& m);
nn::Tensor2 read_store_matrix(std::istream& is);

}  // namespace sagenet
