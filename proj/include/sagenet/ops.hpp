#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "sagenet/sampler.hpp"
#include "sagenet/tensor.hpp"

namespace sagenet::nn {

// Each op has a forward returning its output and a backward that takes the
// upstream gradient, accumulates into parameter grads and returns the input
// gradient.

/// y = x Wᵀ (+ b), with W shaped (out x in) and b shaped (1 x out).
Tensor2 linear(const Tensor2& x, const ParamTensor& w);
Tensor2 linear(const Tensor2& x, const ParamTensor& w, const ParamTensor& b);
/// dW += gᵀx, db += colsum(g); returns dx = gW.
Tensor2 linear_backward(const Tensor2& x, const Tensor2& g, ParamTensor& w, ParamTensor* b = nullptr);
/// Parameter half of linear_backward, for layers whose input is constant.
void linear_backward_params(const Tensor2& x, const Tensor2& g, ParamTensor& w, ParamTensor* b = nullptr);

/// Row i = mean of rows `rows[offsets[i]..offsets[i+1])` of `feats`; a row
/// with no neighbors is zero.
Tensor2 mean_aggregate(const Tensor2& feats, std::span<const std::uint64_t> offsets,
                       std::span<const std::uint32_t> rows);
Tensor2 mean_aggregate_backward(const Tensor2& g, std::span<const std::uint64_t> offsets,
                                std::span<const std::uint32_t> rows, std::size_t feat_rows);
inline Tensor2 mean_aggregate(const Tensor2& feats, const BlockHop& hop) {
  return mean_aggregate(feats, hop.offsets, hop.neighbor_rows);
}
inline Tensor2 mean_aggregate_backward(const Tensor2& g, const BlockHop& hop, std::size_t feat_rows) {
  return mean_aggregate_backward(g, hop.offsets, hop.neighbor_rows, feat_rows);
}

Tensor2 relu(const Tensor2& x);
/// `x` is the pre-activation input.
Tensor2 relu_backward(const Tensor2& x, const Tensor2& g);

/// Column-wise [a | b].
Tensor2 concat(const Tensor2& a, const Tensor2& b);
std::pair<Tensor2, Tensor2> concat_backward(const Tensor2& g, std::size_t a_cols);

/// Row-wise x / ||x||₂; zero rows stay zero.
Tensor2 l2_normalize_rows(const Tensor2& x);
Tensor2 l2_normalize_rows_backward(const Tensor2& x, const Tensor2& g);

Tensor2 gather_rows(const Tensor2& x, std::span<const std::size_t> rows);
/// Adds row k of `g` into row rows[k] of a zero tensor with `out_rows` rows.
Tensor2 scatter_rows(const Tensor2& g, std::span<const std::size_t> rows, std::size_t out_rows);

struct LossResult {
  double loss = 0.0;
  Tensor2 grad;  // d loss / d input
};

Tensor2 softmax(const Tensor2& logits);
double sigmoid(double x);

/// Mean categorical cross-entropy over rows, max-subtracted for stability.
LossResult softmax_cross_entropy(const Tensor2& logits, std::span<const int> labels);
/// Mean absolute error for an (n x 1) prediction; subgradient 0 at equality.
LossResult mae_loss(const Tensor2& pred, std::span<const double> target);
/// Mean element-wise binary cross-entropy on logits.
LossResult bce_with_logits(const Tensor2& logits, const Tensor2& targets);

}  // namespace sagenet::nn
