#include "sagenet/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "binary_io.hpp"

namespace sagenet {

EmbeddingStore::EmbeddingStore(std::vector<std::string> ids, nn::Tensor2 matrix)
    : ids_(std::move(ids)), matrix_(std::move(matrix)) {
  if (ids_.size() != matrix_.rows()) throw Error("embedding store: id count does not match rows");
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (!index_.emplace(ids_[i], i).second) throw Error("embedding store: duplicate id '" + ids_[i] + "'");
  if (!matrix_.all_finite()) throw Error("embedding store: non-finite entries");
}

std::optional<std::size_t> EmbeddingStore::row_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingStore embed_all(const InferenceContext& ctx, const RecordManifest& manifest, std::span<const NodeId> nodes) {
  auto result = run_inference(ctx, nodes);
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (NodeId v : nodes) ids.push_back(manifest[v].id);
  return EmbeddingStore(std::move(ids), std::move(result.embeddings));
}

namespace {

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine_distance: dimension mismatch");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return 1.0 - dot / (na * nb);
}

std::vector<Neighbor> knn(const EmbeddingStore& store, const std::string& query_id, std::size_t k) {
  auto q = store.row_of(query_id);
  if (!q) throw Error("query id '" + query_id + "' is not in the embedding store");
  if (k >= store.size())
    throw Error("k = " + std::to_string(k) + " must be smaller than the store size " + std::to_string(store.size()));
  auto query = store.matrix().row(*q);
  if (norm(query) == 0.0) throw Error("degenerate embedding");

  std::vector<Neighbor> all;
  all.reserve(store.size() - 1);
  for (std::size_t r = 0; r < store.size(); ++r) {
    if (r == *q) continue;
    all.push_back({store.ids()[r], cosine_distance(query, store.matrix().row(r))});
  }
  auto less = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), less);
  all.resize(k);
  return all;
}

void write_store_matrix(std::ostream& os, const nn::Tensor2& m) {
  os.write(kStoreMagic.data(), kStoreMagic.size());
  detail::put<std::uint64_t>(os, m.rows());
  detail::put<std::uint64_t>(os, m.cols());
  for (double v : m.data()) detail::put(os, v);
  if (!os) throw Error("failed writing embedding store");
}

nn::Tensor2 read_store_matrix(std::istream& is) {
  detail::Reader in(is, "embedding store");
  in.expect_magic(kStoreMagic);
  const auto rows = in.get<std::uint64_t>();
  const auto dim = in.get<std::uint64_t>();
  nn::Tensor2 m(rows, dim, in.get_array<double>(in.checked_product(rows, dim)));
  in.expect_end();
  return m;
}

void save_store(const std::filesystem::path& path, const EmbeddingStore& store) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write_store_matrix(os, store.matrix());
  }
  auto ids_path = path;
  ids_path += ".ids.json";
  std::ofstream js(ids_path);
  if (!js) throw Error("cannot open " + ids_path.string() + " for writing");
  js << nlohmann::json(store.ids()).dump() << '\n';
}

EmbeddingStore load_store(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  auto m = read_store_matrix(is);
  auto ids_path = path;
  ids_path += ".ids.json";
  std::ifstream js(ids_path);
  if (!js) throw Error("cannot open " + ids_path.string());
  std::vector<std::string> ids;
  try {
    ids = nlohmann::json::parse(js).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("embedding store ids: " + std::string(e.what()));
  }
  return EmbeddingStore(std::move(ids), std::move(m));
}

}  // namespace sagenet
