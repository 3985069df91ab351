#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sagenet/common.hpp"

namespace sagenet {

enum class Split { train, val, test, unassigned };

Split parse_split(std::string_view name);
std::string_view split_name(Split s);

/// Sentinel for records that lack a grouping property such as `school`.
inline constexpr std::string_view kUnknownProperty = "__unknown__";

/// A task label: class name, numeric target, or a set of tag names.
using Label = std::variant<std::string, double, std::vector<std::string>>;

struct Record {
  std::string id;
  std::map<std::string, std::string> properties;
  std::map<std::string, Label> labels;
  std::vector<std::string> tags;  // bag-of-words node feature source
  Split split = Split::unassigned;

  /// Property value, or the unknown sentinel when absent or empty.
  std::string_view property_or_unknown(const std::string& key) const;
  const Label* label(const std::string& task) const;
};

/// Ordered record collection; node id i is records[i].
class RecordManifest {
 public:
  RecordManifest() = default;
  explicit RecordManifest(std::vector<Record> records);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Record& operator[](NodeId i) const { return records_[i]; }
  Record& operator[](NodeId i) { return records_[i]; }
  const std::vector<Record>& records() const { return records_; }

  std::optional<NodeId> find(std::string_view id) const;
  NodeId node_of(std::string_view id) const;  // throws on unknown id

  std::vector<NodeId> nodes_in(Split s) const;
  /// Fills `school` with the sentinel where absent.
  void fill_missing_property(const std::string& key);

 private:
  void reindex();

  std::vector<Record> records_;
  std::unordered_map<std::string, NodeId> index_;
};

}  // namespace sagenet
