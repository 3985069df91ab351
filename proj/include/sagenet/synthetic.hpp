#pragma once

#include "sagenet/features.hpp"
#include "sagenet/splits.hpp"

namespace sagenet {

/// Planted-partition toy collection: style classes follow the school with
/// probability `school_affinity`, features are a class prototype plus
/// Gaussian noise, `date` = 1850 + 10 * class + 2 * z where z is the
/// standardized noise of feature 0, and `tags` is a fixed multi-hot code of
/// the class over t0, t1, t2.
struct SyntheticSpec {
  std::size_t nodes = 200;
  std::size_t schools = 4;
  std::size_t classes = 4;
  std::size_t artists_per_school = 5;
  std::size_t feature_dim = 16;
  std::size_t visual_dim = 16;
  double noise_sigma = 0.5;
  double school_affinity = 0.85;
  SplitFractions fractions;
  Seed seed = 7;
};

struct SyntheticData {
  RecordManifest manifest;
  FeatureMatrix node_features;
  FeatureMatrix visual_features;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace sagenet
