#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sagenet/common.hpp"
#include "sagenet/manifest.hpp"

namespace sagenet {

/// Undirected simple graph in CSR form. Every edge is stored in both
/// directions and each neighbor list is sorted ascending.
class Graph {
 public:
  Graph() : offsets_{0} {}
  Graph(std::size_t node_count, std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors);

  /// Builds from an undirected edge list. Self-loops and duplicates are
  /// dropped; both directions are materialized.
  static Graph from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);
  static Graph from_edges(std::size_t node_count,
                          std::initializer_list<std::pair<NodeId, NodeId>> edges) {
    return from_edges(node_count, std::span<const std::pair<NodeId, NodeId>>(edges.begin(), edges.size()));
  }

  std::size_t node_count() const { return offsets_.size() - 1; }
  /// Number of stored adjacency entries (twice the undirected edge count).
  std::size_t entry_count() const { return neighbors_.size(); }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;
  bool has_edge(NodeId a, NodeId b) const;

  /// Undirected edges as (low, high) pairs in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& neighbor_array() const { return neighbors_; }

  /// Throws unless the CSR is symmetric, sorted, loop-free and duplicate-free.
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> neighbors_;
};

/// Links every pair of distinct records sharing the same value of
/// `property_key`. Records lacking the property share the unknown sentinel.
Graph build_adjacency(const RecordManifest& manifest, const std::string& property_key);

/// Caps every degree at `max_degree`. Nodes are visited in ascending id; an
/// over-cap node keeps a uniform random subset of its current incident edges
/// and the dropped edges are removed from both endpoints.
Graph downsample_degrees(const Graph& g, std::size_t max_degree, Seed seed);

/// Subgraph keeping edges whose endpoints both belong to `split`.
Graph split_view(const Graph& g, const RecordManifest& manifest, Split split);
/// Subgraph keeping edges whose endpoints both belong to one of `allowed`.
Graph split_view(const Graph& g, const RecordManifest& manifest, std::span<const Split> allowed);
/// Parses the split name first; unknown names raise.
Graph split_view(const Graph& g, const RecordManifest& manifest, std::string_view split);

}  // namespace sagenet
