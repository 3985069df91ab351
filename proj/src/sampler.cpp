#include "sagenet/sampler.hpp"

#include <algorithm>
#include <unordered_map>

namespace sagenet {

std::vector<NodeId> sample_without_replacement(std::vector<NodeId> candidates, std::size_t fanout, Rng& rng) {
  if (candidates.size() > fanout) {
    for (std::size_t k = 0; k < fanout; ++k) {
      auto j = k + uniform_index(rng, candidates.size() - k);
      std::swap(candidates[k], candidates[j]);
    }
    candidates.resize(fanout);
  }
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

SampledBlock sample_neighborhood(const Graph& g, std::span<const NodeId> seeds,
                                 const SamplerOptions& options, std::span<const std::string> artists,
                                 Seed seed) {
  const bool mask = options.mask_same_artist_hop1;
  if (mask && artists.size() != g.node_count())
    throw Error("artist list must cover every node when same-artist masking is enabled");

  SampledBlock block;
  block.fanouts = options.fanouts;
  std::vector<NodeId> level(seeds.begin(), seeds.end());
  for (NodeId s : level)
    if (s >= g.node_count()) throw Error("seed node " + std::to_string(s) + " out of range");

  for (std::size_t hop = 0; hop < options.fanouts.size(); ++hop) {
    BlockHop h;
    h.seeds = std::move(level);
    h.offsets.reserve(h.seeds.size() + 1);

    std::vector<NodeId> next;
    std::unordered_map<NodeId, std::uint32_t> row_of;
    for (NodeId v : h.seeds) {
      std::vector<NodeId> candidates;
      auto nb = g.neighbors(v);
      if (hop == 0 && mask) {
        const std::string& own = artists[v];
        for (NodeId u : nb)
          if (own.empty() || artists[u] != own) candidates.push_back(u);
      } else {
        candidates.assign(nb.begin(), nb.end());
      }
      Rng rng(derive_seed(seed, hop, v));
      for (NodeId u : sample_without_replacement(std::move(candidates), options.fanouts[hop], rng)) {
        auto [it, inserted] = row_of.try_emplace(u, static_cast<std::uint32_t>(next.size()));
        if (inserted) next.push_back(u);
        h.neighbors.push_back(u);
        h.neighbor_rows.push_back(it->second);
      }
      h.offsets.push_back(h.neighbors.size());
    }
    block.hops.push_back(std::move(h));
    level = std::move(next);
  }
  block.frontier = std::move(level);
  return block;
}

}  // namespace sagenet
