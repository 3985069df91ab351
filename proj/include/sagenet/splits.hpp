#pragma once

#include <array>
#include <string>
#include <vector>

#include "sagenet/manifest.hpp"

namespace sagenet {

struct SplitFractions {
  double train = 0.85;
  double val = 0.095;
  double test = 0.055;

  std::array<double, 3> as_array() const { return {train, val, test}; }
  void validate() const;
};

struct SplitAssignment {
  std::vector<Split> split;  // per node id
  SplitFractions fractions;
  Seed seed = 0;

  std::array<std::size_t, 3> counts() const;
};

/// Seeded split assignment, stratified by the `stratify_label` class when
/// records carry it. Records are grouped by stratum (records without the
/// label form their own stratum), shuffled within each stratum, and then
/// dealt in sequence to whichever split is furthest below its running
/// quota, which keeps both the global and the per-stratum counts within a
/// record or two of the exact fractions.
SplitAssignment make_splits(const RecordManifest& manifest, const SplitFractions& fractions, Seed seed,
                            const std::string& stratify_label = "style");

void apply_splits(RecordManifest& manifest, const SplitAssignment& assignment);

/// Start year of the half-century bucket containing `year`.
int timeframe_of(double year);

/// Adds a `out_label` class label ("1900" for 1900-1949) to every record
/// with a numeric `date_label` and no existing `out_label`. Returns the
/// number of records labelled.
std::size_t derive_timeframes(RecordManifest& manifest, const std::string& date_label = "date",
                              const std::string& out_label = "timeframe");

}  // namespace sagenet
