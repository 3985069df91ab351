#pragma once

#include <filesystem>
#include <iosfwd>

#include "sagenet/features.hpp"
#include "sagenet/graph.hpp"
#include "sagenet/manifest.hpp"

namespace sagenet {

// Manifest: UTF-8 JSON lines, one record per line:
//   {"id": "...", "properties": {"school": "..."}, "labels": {"style": "...",
//    "date": 1907, "tags": ["..."]}, "split": "train", "tags": ["..."]}
// `split` and the top-level `tags` (bag-of-words source) are optional.
RecordManifest read_manifest(std::istream& is);
RecordManifest load_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& os, const RecordManifest& manifest);
void save_manifest(const std::filesystem::path& path, const RecordManifest& manifest);

inline constexpr std::string_view kFeatureMagic = "SGF1";
inline constexpr std::uint32_t kDtypeF32 = 1;

// Feature file: magic "SGF1", u64 row_count, u64 dim, u32 dtype (1 = f32),
// then row_count ids as (u32 byte length, UTF-8 bytes), then the row-major
// f32 payload. All integers and floats little-endian.
FeatureMatrix read_features(std::istream& is);
FeatureMatrix load_features(const std::filesystem::path& path);
void write_features(std::ostream& os, const FeatureMatrix& fm);
void save_features(const std::filesystem::path& path, const FeatureMatrix& fm);

inline constexpr std::string_view kGraphMagic = "SGG1";

// Graph file: magic "SGG1", u64 node_count, u64 entry_count (adjacency
// entries, twice the undirected edge count), u64 offsets[node_count + 1],
// u64 neighbors[entry_count]. Little-endian.
Graph read_graph(std::istream& is);
Graph load_graph(const std::filesystem::path& path);
void write_graph(std::ostream& os, const Graph& g);
void save_graph(const std::filesystem::path& path, const Graph& g);

}  // namespace sagenet
