#include "sagenet/manifest.hpp"

namespace sagenet {

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw Error("unknown split name '" + std::string(name) + "'");
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

std::string_view Record::property_or_unknown(const std::string& key) const {
  auto it = properties.find(key);
  if (it == properties.end() || it->second.empty()) return kUnknownProperty;
  return it->second;
}

const Label* Record::label(const std::string& task) const {
  auto it = labels.find(task);
  return it == labels.end() ? nullptr : &it->second;
}

RecordManifest::RecordManifest(std::vector<Record> records) : records_(std::move(records)) {
  reindex();
}

void RecordManifest::reindex() {
  index_.clear();
  index_.reserve(records_.size());
  for (NodeId i = 0; i < records_.size(); ++i) {
    if (records_[i].id.empty()) throw Error("record " + std::to_string(i) + " has an empty id");
    if (!index_.emplace(records_[i].id, i).second)
      throw Error("duplicate record id '" + records_[i].id + "'");
  }
}

std::optional<NodeId> RecordManifest::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId RecordManifest::node_of(std::string_view id) const {
  auto n = find(id);
  if (!n) throw Error("unknown record id '" + std::string(id) + "'");
  return *n;
}

std::vector<NodeId> RecordManifest::nodes_in(Split s) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < records_.size(); ++i)
    if (records_[i].split == s) out.push_back(i);
  return out;
}

void RecordManifest::fill_missing_property(const std::string& key) {
  for (auto& r : records_) {
    auto& v = r.properties[key];
    if (v.empty()) v = std::string(kUnknownProperty);
  }
}

}  // namespace sagenet
