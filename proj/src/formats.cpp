#include "sagenet/formats.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "binary_io.hpp"

namespace sagenet {

using nlohmann::json;

namespace {

constexpr std::uint32_t kMaxIdBytes = 1u << 16;

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

Record record_from_json(const json& j) {
  Record r;
  if (!j.is_object()) throw Error("record is not a JSON object");
  r.id = j.at("id").get<std::string>();
  if (auto it = j.find("properties"); it != j.end())
    for (const auto& [k, v] : it->items()) r.properties[k] = v.get<std::string>();
  if (auto it = j.find("labels"); it != j.end()) {
    for (const auto& [k, v] : it->items()) {
      if (v.is_null()) continue;
      if (v.is_string()) r.labels[k] = v.get<std::string>();
      else if (v.is_number()) r.labels[k] = v.get<double>();
      else if (v.is_array()) r.labels[k] = v.get<std::vector<std::string>>();
      else throw Error("label '" + k + "' must be a string, number or list of strings");
    }
  }
  if (auto it = j.find("tags"); it != j.end() && !it->is_null()) r.tags = it->get<std::vector<std::string>>();
  if (auto it = j.find("split"); it != j.end() && !it->is_null()) r.split = parse_split(it->get<std::string>());
  return r;
}

json record_to_json(const Record& r) {
  json j;
  j["id"] = r.id;
  j["properties"] = r.properties;
  json labels = json::object();
  for (const auto& [k, v] : r.labels) std::visit([&](const auto& x) { labels[k] = x; }, v);
  j["labels"] = labels;
  if (!r.tags.empty()) j["tags"] = r.tags;
  if (r.split != Split::unassigned) j["split"] = std::string(split_name(r.split));
  return j;
}

}  // namespace

RecordManifest read_manifest(std::istream& is) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error("manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    return RecordManifest(std::move(records));
  } catch (const Error& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
}

RecordManifest load_manifest(const std::filesystem::path& path) {
  auto is = open_in(path, false);
  return read_manifest(is);
}

void write_manifest(std::ostream& os, const RecordManifest& manifest) {
  for (const auto& r : manifest.records()) os << record_to_json(r).dump() << '\n';
}

void save_manifest(const std::filesystem::path& path, const RecordManifest& manifest) {
  auto os = open_out(path, false);
  write_manifest(os, manifest);
}

FeatureMatrix read_features(std::istream& is) {
  detail::Reader in(is, "feature file");
  in.expect_magic(kFeatureMagic);
  const auto rows = in.get<std::uint64_t>();
  const auto dim = in.get<std::uint64_t>();
  const auto dtype = in.get<std::uint32_t>();
  if (dtype != kDtypeF32) in.fail("unsupported dtype code " + std::to_string(dtype));
  if (dim == 0) in.fail("feature dim must be positive");

  const auto values = in.checked_product(rows, dim);

  FeatureMatrix fm;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::uint64_t r = 0; r < rows; ++r) {
    const auto len = in.get<std::uint32_t>();
    if (len > kMaxIdBytes) in.fail("id length " + std::to_string(len) + " exceeds " + std::to_string(kMaxIdBytes));
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (id.empty()) in.fail("empty id for row " + std::to_string(r));
    if (!seen.emplace(id, r).second) in.fail("duplicate id '" + id + "'");
    fm.ids.push_back(std::move(id));
  }
  fm.data = nn::Tensor2(rows, dim, in.get_array<float, double>(values));
  in.expect_end();
  return fm;
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  auto is = open_in(path, true);
  return read_features(is);
}

void write_features(std::ostream& os, const FeatureMatrix& fm) {
  if (fm.ids.size() != fm.rows()) throw Error("feature id list does not match row count");
  os.write(kFeatureMagic.data(), kFeatureMagic.size());
  detail::put<std::uint64_t>(os, fm.rows());
  detail::put<std::uint64_t>(os, fm.dim());
  detail::put<std::uint32_t>(os, kDtypeF32);
  for (const auto& id : fm.ids) {
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(id.size()));
    os.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (double v : fm.data.data()) detail::put(os, static_cast<float>(v));
  if (!os) throw Error("failed writing feature file");
}

void save_features(const std::filesystem::path& path, const FeatureMatrix& fm) {
  auto os = open_out(path, true);
  write_features(os, fm);
}

Graph read_graph(std::istream& is) {
  detail::Reader in(is, "graph file");
  in.expect_magic(kGraphMagic);
  const auto n = in.get<std::uint64_t>();
  const auto entries = in.get<std::uint64_t>();
  if (n > std::numeric_limits<NodeId>::max()) in.fail("node count exceeds the 32-bit id range");
  auto offsets = in.get_array<std::uint64_t>(n + 1);
  std::vector<NodeId> nbrs;
  for (std::uint64_t k = 0; k < entries; ++k) {
    const auto x = in.get<std::uint64_t>();
    if (x >= n) in.fail("neighbor id out of range");
    nbrs.push_back(static_cast<NodeId>(x));
  }
  in.expect_end();
  Graph g;
  try {
    g = Graph(n, std::move(offsets), std::move(nbrs));
    g.validate();
  } catch (const Error& e) {
    throw Error(std::string("graph file: ") + e.what());
  }
  return g;
}

Graph load_graph(const std::filesystem::path& path) {
  auto is = open_in(path, true);
  return read_graph(is);
}

void write_graph(std::ostream& os, const Graph& g) {
  os.write(kGraphMagic.data(), kGraphMagic.size());
  detail::put<std::uint64_t>(os, g.node_count());
  detail::put<std::uint64_t>(os, g.entry_count());
  for (auto o : g.offsets()) detail::put<std::uint64_t>(os, o);
  for (auto v : g.neighbor_array()) detail::put<std::uint64_t>(os, v);
  if (!os) throw Error("failed writing graph file");
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  auto os = open_out(path, true);
  write_graph(os, g);
}

}  // namespace sagenet
