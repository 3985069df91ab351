#pragma once

// Slow, definition-following reference implementations used as test oracles.
// They share no code with the library beyond the plain data types and the
// seeded RNG primitive.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sagenet/graph.hpp"
#include "sagenet/tensor.hpp"

namespace oracle {

using sagenet::NodeId;
using Dense = std::vector<std::vector<char>>;

inline Dense dense_adjacency(const sagenet::RecordManifest& m, const std::string& key) {
  const std::size_t n = m.size();
  Dense a(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = i != j && m[static_cast<NodeId>(i)].property_or_unknown(key) ==
                              m[static_cast<NodeId>(j)].property_or_unknown(key);
  return a;
}

inline Dense dense_of(const sagenet::Graph& g) {
  const std::size_t n = g.node_count();
  Dense a(n, std::vector<char>(n, 0));
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(v)) a[v][u] = 1;
  return a;
}

inline bool symmetric_simple(const Dense& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i][i]) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != a[j][i]) return false;
  }
  return true;
}

inline std::size_t degree(const Dense& a, std::size_t i) {
  return static_cast<std::size_t>(std::count(a[i].begin(), a[i].end(), 1));
}

inline Dense split_filter(const Dense& a, const sagenet::RecordManifest& m,
                          const std::vector<sagenet::Split>& allowed) {
  Dense out = a;
  auto ok = [&](std::size_t i) {
    return std::find(allowed.begin(), allowed.end(), m[static_cast<NodeId>(i)].split) != allowed.end();
  };
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (!(ok(i) && ok(j))) out[i][j] = 0;
  return out;
}

/// Degree cap on a dense matrix: visit nodes in ascending id; an over-cap
/// node keeps the first `cap` entries of a partial Fisher-Yates shuffle of
/// its ascending neighbor list, and every other incident edge is cleared in
/// both directions.
inline Dense downsample(Dense a, std::size_t cap, sagenet::Seed seed) {
  std::size_t max_deg = 0;
  for (std::size_t i = 0; i < a.size(); ++i) max_deg = std::max(max_deg, degree(a, i));
  if (max_deg <= cap) return a;
  sagenet::Rng rng(seed);
  for (std::size_t v = 0; v < a.size(); ++v) {
    std::vector<NodeId> nb;
    for (std::size_t u = 0; u < a.size(); ++u)
      if (a[v][u]) nb.push_back(static_cast<NodeId>(u));
    if (nb.size() <= cap) continue;
    for (std::size_t k = 0; k < cap; ++k) std::swap(nb[k], nb[k + sagenet::uniform_index(rng, nb.size() - k)]);
    for (std::size_t k = cap; k < nb.size(); ++k) a[v][nb[k]] = a[nb[k]][v] = 0;
  }
  return a;
}

// ---- metrics ----

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  double hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) hits += 1;
  return 100.0 * hits / static_cast<double>(pred.size());
}

/// Percent of |e| strictly below theta.
inline double cumulative_score(const std::vector<double>& errs, double theta) {
  double c = 0;
  for (double e : errs)
    if (std::abs(e) < theta) c += 1;
  return 100.0 * c / static_cast<double>(errs.size());
}

struct F1 {
  double cf1 = 0, of1 = 0;
};

/// Per-class confusion counts, F1 = 2PR/(P+R) with P or R = 0 giving 0.
/// CF1 averages classes holding at least one positive label.
inline F1 f1(const sagenet::nn::Tensor2& scores, const sagenet::nn::Tensor2& truth, double thr) {
  F1 out;
  double tp_all = 0, fp_all = 0, fn_all = 0, sum = 0, counted = 0;
  for (std::size_t k = 0; k < scores.cols(); ++k) {
    double conf[2][2] = {{0, 0}, {0, 0}};  // [truth][pred]
    for (std::size_t i = 0; i < scores.rows(); ++i) conf[truth(i, k) > 0.5][scores(i, k) >= thr] += 1;
    const double tp = conf[1][1], fp = conf[0][1], fn = conf[1][0];
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    if (tp + fn == 0) continue;
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp / (tp + fn);
    sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    counted += 1;
  }
  out.cf1 = counted > 0 ? sum / counted : 0.0;
  const double p = tp_all + fp_all > 0 ? tp_all / (tp_all + fp_all) : 0.0;
  const double r = tp_all + fn_all > 0 ? tp_all / (tp_all + fn_all) : 0.0;
  out.of1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  return out;
}

/// O(n^2) average precision: the rank of item i is one plus the number of
/// items scored higher, or scored equal with a smaller index.
inline double average_precision(const std::vector<double>& s, const std::vector<int>& rel) {
  const std::size_t n = s.size();
  auto rank = [&](std::size_t i) {
    std::size_t r = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++r;
    return r;
  };
  double sum = 0, positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rel[i]) continue;
    positives += 1;
    const std::size_t ri = rank(i);
    double hits = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (rel[j] && rank(j) <= ri) hits += 1;
    sum += hits / static_cast<double>(ri);
  }
  return positives > 0 ? sum / positives : std::numeric_limits<double>::quiet_NaN();
}

inline double mean_average_precision(const sagenet::nn::Tensor2& scores, const sagenet::nn::Tensor2& truth) {
  double sum = 0, counted = 0;
  for (std::size_t k = 0; k < scores.cols(); ++k) {
    std::vector<double> s;
    std::vector<int> r;
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      s.push_back(scores(i, k));
      r.push_back(truth(i, k) > 0.5);
    }
    const double ap = average_precision(s, r);
    if (!std::isnan(ap)) {
      sum += ap;
      counted += 1;
    }
  }
  return counted > 0 ? sum / counted : 0.0;
}

// ---- schedules ----

/// Learning rate after each epoch. The anchor is the last epoch that
/// improved the best loss or triggered a reduction; a reduction fires when
/// the anchor is `patience` epochs old.
inline std::vector<double> plateau_trace(const std::vector<double>& losses, double lr, double factor,
                                         std::size_t patience) {
  std::vector<double> out;
  double best = std::numeric_limits<double>::infinity();
  std::size_t anchor = 0;
  for (std::size_t t = 1; t <= losses.size(); ++t) {
    if (losses[t - 1] < best) {
      best = losses[t - 1];
      anchor = t;
    } else if (t - anchor >= patience) {
      lr /= factor;
      anchor = t;
    }
    out.push_back(lr);
  }
  return out;
}

/// 1-based epoch at which training stops, or 0 if it never does: the first
/// epoch whose best-so-far loss (earliest minimum) is `patience` epochs old.
inline std::size_t early_stop_epoch(const std::vector<double>& losses, std::size_t patience) {
  for (std::size_t t = 1; t <= losses.size(); ++t) {
    std::size_t best_epoch = 1;
    for (std::size_t s = 2; s <= t; ++s)
      if (losses[s - 1] < losses[best_epoch - 1]) best_epoch = s;
    if (t - best_epoch >= patience) return t;
  }
  return 0;
}

// ---- retrieval ----

inline double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Every other row scored and fully sorted by (distance, id); first k kept.
inline std::vector<std::pair<double, std::string>> knn(const std::vector<std::string>& ids,
                                                       const std::vector<std::vector<double>>& rows,
                                                       std::size_t query, std::size_t k) {
  std::vector<std::pair<double, std::string>> all;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i != query) all.emplace_back(cosine_distance(rows[query], rows[i]), ids[i]);
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return all;
}

}  // namespace oracle
