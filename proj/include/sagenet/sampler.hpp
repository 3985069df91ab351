#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sagenet/graph.hpp"

namespace sagenet {

/// One hop of a sampled computation graph: each seed's sampled neighbors,
/// both as global ids and as row indices into the next level's node list.
struct BlockHop {
  std::vector<NodeId> seeds;
  std::vector<std::uint64_t> offsets{0};
  std::vector<NodeId> neighbors;
  std::vector<std::uint32_t> neighbor_rows;

  std::size_t seed_count() const { return seeds.size(); }
  std::span<const NodeId> sampled(std::size_t i) const {
    return {neighbors.data() + offsets[i], neighbors.data() + offsets[i + 1]};
  }
};

/// Multi-hop neighborhood sample. Level 0 is the batch seeds, level d+1 is
/// the deduplicated (first-seen order) union of the neighbors sampled at
/// hop d. `hops[d].seeds` is level d and `frontier` is the last level.
struct SampledBlock {
  std::vector<std::size_t> fanouts;
  std::vector<BlockHop> hops;
  std::vector<NodeId> frontier;

  std::size_t depth() const { return hops.size(); }
  std::span<const NodeId> level(std::size_t d) const {
    return d < hops.size() ? std::span<const NodeId>(hops[d].seeds) : std::span<const NodeId>(frontier);
  }
};

inline const std::vector<std::size_t> kDefaultFanouts{25, 10};

struct SamplerOptions {
  std::vector<std::size_t> fanouts = kDefaultFanouts;
  /// Drop hop-1 candidates that share the seed's artist.
  bool mask_same_artist_hop1 = true;
};

/// Uniform sampling without replacement, taking every candidate when there
/// are fewer than the fanout. A node's draw at a given hop depends only on
/// (seed, hop, node id), so results do not depend on batch composition.
/// `artists` holds one entry per node (empty string means unknown, which
/// never matches); it may be empty when masking is disabled.
SampledBlock sample_neighborhood(const Graph& g, std::span<const NodeId> seeds,
                                 const SamplerOptions& options, std::span<const std::string> artists,
                                 Seed seed);

/// Draws up to `fanout` of `candidates` uniformly without replacement; the
/// result is sorted ascending.
std::vector<NodeId> sample_without_replacement(std::vector<NodeId> candidates, std::size_t fanout, Rng& rng);

}  // namespace sagenet
