#include "sagenet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sagenet::metrics {

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw Error("accuracy: size mismatch");
  if (pred.empty()) throw Error("accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw Error("mean_absolute_error: size mismatch");
  if (pred.empty()) throw Error("mean_absolute_error: no samples");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

double cumulative_score(std::span<const double> abs_errors, double theta, bool strict) {
  if (abs_errors.empty()) throw Error("cumulative_score: no samples");
  std::size_t within = 0;
  for (double e : abs_errors) {
    const double a = std::abs(e);
    within += strict ? a < theta : a <= theta;
  }
  return 100.0 * static_cast<double>(within) / static_cast<double>(abs_errors.size());
}

std::vector<CsPoint> cumulative_score_curve(std::span<const double> abs_errors, double start, double stop,
                                            double step, bool strict) {
  if (!(step > 0.0) || stop < start) throw Error("cumulative_score_curve: invalid theta range");
  if (abs_errors.empty()) throw Error("cumulative_score: no samples");
  std::vector<double> sorted;
  sorted.reserve(abs_errors.size());
  for (double e : abs_errors) sorted.push_back(std::abs(e));
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::vector<CsPoint> curve;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = start + step * static_cast<double>(i);
    const auto it = strict ? std::lower_bound(sorted.begin(), sorted.end(), theta)
                           : std::upper_bound(sorted.begin(), sorted.end(), theta);
    curve.push_back({theta, 100.0 * static_cast<double>(it - sorted.begin()) / n});
  }
  return curve;
}

F1Scores cf1_of1(const nn::Tensor2& scores, const nn::Tensor2& truth, double threshold) {
  if (!scores.same_shape(truth)) throw Error("cf1_of1: shape mismatch");
  const std::size_t n = scores.rows(), c = scores.cols();
  F1Scores out;
  out.per_class.assign(c, 0.0);
  out.class_counted.assign(c, 0);
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool p = scores(i, k) >= threshold;
      const bool t = truth(i, k) > 0.5;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    const std::size_t denom = 2 * tp + fp + fn;
    out.per_class[k] = denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
    if (tp + fn > 0) {
      out.class_counted[k] = 1;
      sum += out.per_class[k];
      ++counted;
    }
  }
  out.cf1 = counted ? sum / static_cast<double>(counted) : 0.0;
  const std::size_t denom = 2 * tp_all + fp_all + fn_all;
  out.of1 = denom ? 2.0 * static_cast<double>(tp_all) / static_cast<double>(denom) : 0.0;
  return out;
}

double average_precision(std::span<const double> scores, std::span<const int> relevant) {
  if (scores.size() != relevant.size()) throw Error("average_precision: size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!relevant[order[rank]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return hits ? sum / static_cast<double>(hits) : std::numeric_limits<double>::quiet_NaN();
}

double mean_average_precision(const nn::Tensor2& scores, const nn::Tensor2& truth) {
  if (!scores.same_shape(truth)) throw Error("mean_average_precision: shape mismatch");
  double sum = 0.0;
  std::size_t counted = 0;
  std::vector<double> col(scores.rows());
  std::vector<int> rel(scores.rows());
  for (std::size_t k = 0; k < scores.cols(); ++k) {
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      col[i] = scores(i, k);
      rel[i] = truth(i, k) > 0.5;
    }
    const double ap = average_precision(col, rel);
    if (std::isnan(ap)) continue;
    sum += ap;
    ++counted;
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

}  // namespace sagenet::metrics
