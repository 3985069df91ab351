#include "sagenet/splits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sagenet {

void SplitFractions::validate() const {
  for (double f : as_array())
    if (!(f >= 0.0) || f > 1.0) throw Error("split fractions must lie in [0, 1]");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (Split s : split)
    if (s != Split::unassigned) ++c[static_cast<std::size_t>(s)];
  return c;
}

SplitAssignment make_splits(const RecordManifest& manifest, const SplitFractions& fractions, Seed seed,
                            const std::string& stratify_label) {
  fractions.validate();
  std::map<std::string, std::vector<NodeId>> strata;
  for (NodeId v = 0; v < manifest.size(); ++v) {
    const Label* l = manifest[v].label(stratify_label);
    const std::string* cls = l ? std::get_if<std::string>(l) : nullptr;
    // "\x01" sorts before any printable class name and cannot collide with one.
    strata[cls ? *cls : std::string("\x01")].push_back(v);
  }

  Rng rng(seed);
  std::vector<NodeId> order;
  order.reserve(manifest.size());
  for (auto& [key, members] : strata) {
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[uniform_index(rng, i)]);
    order.insert(order.end(), members.begin(), members.end());
  }

  const auto f = fractions.as_array();
  SplitAssignment out;
  out.fractions = fractions;
  out.seed = seed;
  out.split.assign(manifest.size(), Split::unassigned);
  std::array<double, 3> dealt{0, 0, 0};
  for (std::size_t p = 0; p < order.size(); ++p) {
    std::size_t pick = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < 3; ++s) {
      if (f[s] == 0.0) continue;
      const double deficit = static_cast<double>(p + 1) * f[s] - dealt[s];
      if (deficit > best) {
        best = deficit;
        pick = s;
      }
    }
    dealt[pick] += 1.0;
    out.split[order[p]] = static_cast<Split>(pick);
  }
  return out;
}

void apply_splits(RecordManifest& manifest, const SplitAssignment& assignment) {
  if (assignment.split.size() != manifest.size()) throw Error("split assignment does not cover the manifest");
  for (NodeId v = 0; v < manifest.size(); ++v) manifest[v].split = assignment.split[v];
}

int timeframe_of(double year) { return static_cast<int>(std::floor(year / 50.0)) * 50; }

std::size_t derive_timeframes(RecordManifest& manifest, const std::string& date_label, const std::string& out_label) {
  std::size_t n = 0;
  for (NodeId v = 0; v < manifest.size(); ++v) {
    auto& r = manifest[v];
    if (r.labels.count(out_label)) continue;
    const Label* l = r.label(date_label);
    const double* year = l ? std::get_if<double>(l) : nullptr;
    if (!year) continue;
    r.labels[out_label] = std::to_string(timeframe_of(*year));
    ++n;
  }
  return n;
}

}  // namespace sagenet
