#include "sagenet/graph.hpp"

#include <algorithm>
#include <unordered_map>

namespace sagenet {

Graph::Graph(std::size_t node_count, std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {
  if (offsets_.size() != node_count + 1) throw Error("graph offsets length does not match node count");
  if (offsets_.front() != 0 || offsets_.back() != neighbors_.size())
    throw Error("graph offsets do not span the neighbor array");
  for (std::size_t i = 0; i < node_count; ++i)
    if (offsets_[i] > offsets_[i + 1]) throw Error("graph offsets are not monotone");
  for (NodeId n : neighbors_)
    if (n >= node_count) throw Error("graph neighbor id out of range");
}

Graph Graph::from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::uint64_t> degree(node_count + 1, 0);
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) throw Error("edge endpoint out of range");
    if (a == b) continue;
    ++degree[a + 1];
    ++degree[b + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) degree[i + 1] += degree[i];
  std::vector<NodeId> nbrs(degree.back());
  std::vector<std::uint64_t> cursor(degree.begin(), degree.end() - 1);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    nbrs[cursor[a]++] = b;
    nbrs[cursor[b]++] = a;
  }
  // sort + dedup each list, then compact
  std::vector<std::uint64_t> offsets(node_count + 1, 0);
  std::size_t out = 0;
  for (std::size_t v = 0; v < node_count; ++v) {
    auto first = nbrs.begin() + static_cast<std::ptrdiff_t>(degree[v]);
    auto last = nbrs.begin() + static_cast<std::ptrdiff_t>(degree[v + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) nbrs[out++] = *it;
    offsets[v + 1] = out;
  }
  nbrs.resize(out);
  return Graph(node_count, std::move(offsets), std::move(nbrs));
}

std::size_t Graph::max_degree() const {
  std::size_t m = 0;
  for (NodeId v = 0; v < node_count(); ++v) m = std::max(m, degree(v));
  return m;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  auto n = neighbors(a);
  return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (NodeId v = 0; v < node_count(); ++v)
    for (NodeId u : neighbors(v))
      if (v < u) out.emplace_back(v, u);
  return out;
}

void Graph::validate() const {
  for (NodeId v = 0; v < node_count(); ++v) {
    auto n = neighbors(v);
    for (std::size_t k = 0; k < n.size(); ++k) {
      if (n[k] == v) throw Error("self-loop at node " + std::to_string(v));
      if (k > 0 && n[k - 1] >= n[k])
        throw Error("neighbor list of node " + std::to_string(v) + " is unsorted or has duplicates");
      if (!has_edge(n[k], v))
        throw Error("asymmetric edge " + std::to_string(v) + "->" + std::to_string(n[k]));
    }
  }
}

Graph build_adjacency(const RecordManifest& manifest, const std::string& property_key) {
  if (manifest.empty()) throw Error("empty dataset");
  const std::size_t n = manifest.size();

  std::unordered_map<std::string_view, std::vector<NodeId>> groups;
  for (NodeId i = 0; i < n; ++i) groups[manifest[i].property_or_unknown(property_key)].push_back(i);

  // Group members are ascending, so each node's neighbor list is its group
  // minus itself, already sorted.
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<const std::vector<NodeId>*> group_of(n, nullptr);
  for (const auto& [key, members] : groups)
    for (NodeId v : members) group_of[v] = &members;
  for (NodeId v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + group_of[v]->size() - 1;

  std::vector<NodeId> nbrs(offsets.back());
  for (NodeId v = 0; v < n; ++v) {
    auto out = nbrs.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    for (NodeId u : *group_of[v])
      if (u != v) *out++ = u;
  }
  return Graph(n, std::move(offsets), std::move(nbrs));
}

Graph downsample_degrees(const Graph& g, std::size_t max_degree, Seed seed) {
  if (max_degree == 0) throw Error("max_degree must be positive");
  if (g.max_degree() <= max_degree) return g;

  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId v = 0; v < n; ++v) {
    auto nb = g.neighbors(v);
    adj[v].assign(nb.begin(), nb.end());
  }

  Rng rng(seed);
  for (NodeId v = 0; v < n; ++v) {
    auto& list = adj[v];
    if (list.size() <= max_degree) continue;
    // Partial Fisher-Yates: the first `max_degree` entries are a uniform
    // subset of the incident edges; the tail is dropped.
    for (std::size_t k = 0; k < max_degree; ++k) {
      auto j = k + uniform_index(rng, list.size() - k);
      std::swap(list[k], list[j]);
    }
    for (std::size_t k = max_degree; k < list.size(); ++k) {
      auto& other = adj[list[k]];
      other.erase(std::lower_bound(other.begin(), other.end(), v));
    }
    list.resize(max_degree);
    std::sort(list.begin(), list.end());
  }

  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + adj[v].size();
  std::vector<NodeId> nbrs;
  nbrs.reserve(offsets.back());
  for (const auto& list : adj) nbrs.insert(nbrs.end(), list.begin(), list.end());
  return Graph(n, std::move(offsets), std::move(nbrs));
}

Graph split_view(const Graph& g, const RecordManifest& manifest, std::span<const Split> allowed) {
  const std::size_t n = g.node_count();
  if (manifest.size() != n) throw Error("manifest size does not match graph node count");
  std::vector<char> keep(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (manifest[v].split == Split::unassigned)
      throw Error("record '" + manifest[v].id + "' has no split assignment");
    keep[v] = std::find(allowed.begin(), allowed.end(), manifest[v].split) != allowed.end();
  }

  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<NodeId> nbrs;
  for (NodeId v = 0; v < n; ++v) {
    if (keep[v])
      for (NodeId u : g.neighbors(v))
        if (keep[u]) nbrs.push_back(u);
    offsets[v + 1] = nbrs.size();
  }
  return Graph(n, std::move(offsets), std::move(nbrs));
}

Graph split_view(const Graph& g, const RecordManifest& manifest, Split split) {
  const Split one[] = {split};
  return split_view(g, manifest, one);
}

Graph split_view(const Graph& g, const RecordManifest& manifest, std::string_view split) {
  return split_view(g, manifest, parse_split(split));
}

}  // namespace sagenet
