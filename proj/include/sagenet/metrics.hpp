#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sagenet/tensor.hpp"

namespace sagenet::metrics {

/// Percentage of positions where pred == truth.
double accuracy(std::span<const int> pred, std::span<const int> truth);

double mean_absolute_error(std::span<const double> pred, std::span<const double> truth);

/// Percentage of absolute errors below `theta` (strictly, unless `strict`
/// is false, in which case errors equal to theta also count).
double cumulative_score(std::span<const double> abs_errors, double theta, bool strict = true);

struct CsPoint {
  double theta;
  double score;
};

/// CS at every theta in [start, stop] spaced by `step`.
std::vector<CsPoint> cumulative_score_curve(std::span<const double> abs_errors, double start, double stop,
                                            double step, bool strict = true);

struct F1Scores {
  double cf1 = 0.0;  // mean of per-class F1 over classes with a positive label
  double of1 = 0.0;  // F1 of pooled TP/FP/FN
  std::vector<double> per_class;  // F1 for every class (0 where undefined)
  std::vector<char> class_counted;
};

/// Multi-label F1. A class is predicted when its score is >= `threshold`.
F1Scores cf1_of1(const nn::Tensor2& scores, const nn::Tensor2& truth, double threshold = 0.5);

/// Average precision of one ranking: scores sorted descending with ties in
/// index order, averaging precision@k at each positive. NaN with no positives.
double average_precision(std::span<const double> scores, std::span<const int> relevant);

/// Mean of per-class AP over classes with at least one positive.
double mean_average_precision(const nn::Tensor2& scores, const nn::Tensor2& truth);

}  // namespace sagenet::metrics
