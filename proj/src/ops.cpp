#include "sagenet/ops.hpp"

#include <algorithm>
#include <cmath>

namespace sagenet::nn {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(what);
}

}  // namespace

Tensor2 linear(const Tensor2& x, const ParamTensor& w) {
  require(x.cols() == w.cols(), "linear: input width does not match weight");
  const std::size_t n = x.rows(), in = w.cols(), out = w.rows();
  Tensor2 y(n, out);
  const double* wd = w.value.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    double* yi = y.row(i).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = wd + o * in;
      double acc = 0.0;
      for (std::size_t k = 0; k < in; ++k) acc += xi[k] * wo[k];
      yi[o] = acc;
    }
  }
  return y;
}

Tensor2 linear(const Tensor2& x, const ParamTensor& w, const ParamTensor& b) {
  require(b.rows() == 1 && b.cols() == w.rows(), "linear: bias shape mismatch");
  Tensor2 y = linear(x, w);
  const double* bd = b.value.data().data();
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto yi = y.row(i);
    for (std::size_t o = 0; o < yi.size(); ++o) yi[o] += bd[o];
  }
  return y;
}

Tensor2 linear_backward(const Tensor2& x, const Tensor2& g, ParamTensor& w, ParamTensor* b) {
  require(x.cols() == w.cols() && g.cols() == w.rows() && g.rows() == x.rows(),
          "linear_backward: shape mismatch");
  const std::size_t n = x.rows(), in = w.cols(), out = w.rows();
  double* dw = w.grad.data().data();
  const double* wd = w.value.data().data();
  Tensor2 dx(n, in);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    const double* gi = g.row(i).data();
    double* dxi = dx.row(i).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double go = gi[o];
      if (go == 0.0) continue;
      double* dwo = dw + o * in;
      const double* wo = wd + o * in;
      for (std::size_t k = 0; k < in; ++k) {
        dwo[k] += go * xi[k];
        dxi[k] += go * wo[k];
      }
    }
  }
  if (b) {
    require(b->rows() == 1 && b->cols() == out, "linear_backward: bias shape mismatch");
    double* db = b->grad.data().data();
    for (std::size_t i = 0; i < n; ++i) {
      auto gi = g.row(i);
      for (std::size_t o = 0; o < out; ++o) db[o] += gi[o];
    }
  }
  return dx;
}

void linear_backward_params(const Tensor2& x, const Tensor2& g, ParamTensor& w, ParamTensor* b) {
  require(x.cols() == w.cols() && g.cols() == w.rows() && g.rows() == x.rows(),
          "linear_backward: shape mismatch");
  const std::size_t n = x.rows(), in = w.cols(), out = w.rows();
  double* dw = w.grad.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    const double* gi = g.row(i).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double go = gi[o];
      if (go == 0.0) continue;
      double* dwo = dw + o * in;
      for (std::size_t k = 0; k < in; ++k) dwo[k] += go * xi[k];
    }
  }
  if (b) {
    require(b->rows() == 1 && b->cols() == out, "linear_backward: bias shape mismatch");
    double* db = b->grad.data().data();
    for (std::size_t i = 0; i < n; ++i) {
      auto gi = g.row(i);
      for (std::size_t o = 0; o < out; ++o) db[o] += gi[o];
    }
  }
}

Tensor2 mean_aggregate(const Tensor2& feats, std::span<const std::uint64_t> offsets,
                       std::span<const std::uint32_t> rows) {
  require(!offsets.empty() && offsets.back() == rows.size(), "mean_aggregate: malformed offsets");
  const std::size_t n = offsets.size() - 1, d = feats.cols();
  Tensor2 out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto begin = offsets[i], end = offsets[i + 1];
    if (begin == end) continue;
    auto oi = out.row(i);
    for (auto e = begin; e < end; ++e) {
      require(rows[e] < feats.rows(), "mean_aggregate: neighbor row out of range");
      auto fr = feats.row(rows[e]);
      for (std::size_t k = 0; k < d; ++k) oi[k] += fr[k];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (double& v : oi) v *= inv;
  }
  return out;
}

Tensor2 mean_aggregate_backward(const Tensor2& g, std::span<const std::uint64_t> offsets,
                                std::span<const std::uint32_t> rows, std::size_t feat_rows) {
  require(offsets.size() == g.rows() + 1, "mean_aggregate_backward: gradient rows mismatch");
  const std::size_t d = g.cols();
  Tensor2 dfeats(feat_rows, d);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    const auto begin = offsets[i], end = offsets[i + 1];
    if (begin == end) continue;
    const double inv = 1.0 / static_cast<double>(end - begin);
    auto gi = g.row(i);
    for (auto e = begin; e < end; ++e) {
      auto dr = dfeats.row(rows[e]);
      for (std::size_t k = 0; k < d; ++k) dr[k] += gi[k] * inv;
    }
  }
  return dfeats;
}

Tensor2 relu(const Tensor2& x) {
  Tensor2 y = x;
  // NaN passes through so that corrupted inputs surface in the loss.
  for (double& v : y.data()) v = v > 0.0 || std::isnan(v) ? v : 0.0;
  return y;
}

Tensor2 relu_backward(const Tensor2& x, const Tensor2& g) {
  require(x.same_shape(g), "relu_backward: shape mismatch");
  Tensor2 dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(x.data()[i] > 0.0)) dx.data()[i] = 0.0;
  return dx;
}

Tensor2 concat(const Tensor2& a, const Tensor2& b) {
  require(a.rows() == b.rows(), "concat: row count mismatch");
  Tensor2 y(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto yi = y.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), yi.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), yi.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return y;
}

std::pair<Tensor2, Tensor2> concat_backward(const Tensor2& g, std::size_t a_cols) {
  require(a_cols <= g.cols(), "concat_backward: split point out of range");
  Tensor2 da(g.rows(), a_cols), db(g.rows(), g.cols() - a_cols);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    auto gi = g.row(i);
    std::copy(gi.begin(), gi.begin() + static_cast<std::ptrdiff_t>(a_cols), da.row(i).begin());
    std::copy(gi.begin() + static_cast<std::ptrdiff_t>(a_cols), gi.end(), db.row(i).begin());
  }
  return {std::move(da), std::move(db)};
}

Tensor2 l2_normalize_rows(const Tensor2& x) {
  Tensor2 y = x;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto r = y.row(i);
    double ss = 0.0;
    for (double v : r) ss += v * v;
    if (ss == 0.0) continue;
    const double inv = 1.0 / std::sqrt(ss);
    for (double& v : r) v *= inv;
  }
  return y;
}

Tensor2 l2_normalize_rows_backward(const Tensor2& x, const Tensor2& g) {
  require(x.same_shape(g), "l2_normalize_rows_backward: shape mismatch");
  Tensor2 dx(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto xr = x.row(i);
    auto gr = g.row(i);
    double ss = 0.0;
    for (double v : xr) ss += v * v;
    if (ss == 0.0) continue;
    const double norm = std::sqrt(ss);
    // d(x/|x|) = (g - y (y·g)) / |x|
    double yg = 0.0;
    for (std::size_t k = 0; k < xr.size(); ++k) yg += xr[k] * gr[k];
    yg /= norm;
    auto dr = dx.row(i);
    for (std::size_t k = 0; k < xr.size(); ++k) dr[k] = (gr[k] - xr[k] / norm * yg) / norm;
  }
  return dx;
}

Tensor2 gather_rows(const Tensor2& x, std::span<const std::size_t> rows) {
  Tensor2 y(rows.size(), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(rows[k] < x.rows(), "gather_rows: row out of range");
    std::copy(x.row(rows[k]).begin(), x.row(rows[k]).end(), y.row(k).begin());
  }
  return y;
}

Tensor2 scatter_rows(const Tensor2& g, std::span<const std::size_t> rows, std::size_t out_rows) {
  require(g.rows() == rows.size(), "scatter_rows: row count mismatch");
  Tensor2 out(out_rows, g.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto o = out.row(rows[k]);
    auto gk = g.row(k);
    for (std::size_t c = 0; c < gk.size(); ++c) o[c] += gk[c];
  }
  return out;
}

Tensor2 softmax(const Tensor2& logits) {
  Tensor2 p = logits;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    auto r = p.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double& v : r) sum += (v = std::exp(v - mx));
    for (double& v : r) v /= sum;
  }
  return p;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossResult softmax_cross_entropy(const Tensor2& logits, std::span<const int> labels) {
  require(labels.size() == logits.rows(), "softmax_cross_entropy: label count mismatch");
  const std::size_t n = logits.rows(), c = logits.cols();
  LossResult out{0.0, Tensor2(n, c)};
  if (n == 0) return out;
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= c)
      throw Error("softmax_cross_entropy: label " + std::to_string(y) + " out of range [0, " +
                  std::to_string(c) + ")");
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = logits.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double v : r) sum += std::exp(v - mx);
    const double log_z = mx + std::log(sum);
    out.loss -= (r[labels[i]] - log_z) * inv_n;
    auto gi = out.grad.row(i);
    for (std::size_t k = 0; k < c; ++k) gi[k] = std::exp(r[k] - log_z) * inv_n;
    gi[labels[i]] -= inv_n;
  }
  return out;
}

LossResult mae_loss(const Tensor2& pred, std::span<const double> target) {
  require(pred.cols() == 1 && pred.rows() == target.size(), "mae_loss: expects an (n x 1) prediction");
  const std::size_t n = pred.rows();
  LossResult out{0.0, Tensor2(n, 1)};
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = pred(i, 0) - target[i];
    out.loss += std::abs(diff) * inv_n;
    out.grad(i, 0) = diff > 0.0 ? inv_n : (diff < 0.0 ? -inv_n : 0.0);
  }
  return out;
}

LossResult bce_with_logits(const Tensor2& logits, const Tensor2& targets) {
  require(logits.same_shape(targets), "bce_with_logits: shape mismatch");
  LossResult out{0.0, Tensor2(logits.rows(), logits.cols())};
  if (logits.size() == 0) return out;
  const double inv = 1.0 / static_cast<double>(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits.data()[i], t = targets.data()[i];
    // max(z,0) - z t + log(1 + exp(-|z|))
    out.loss += (std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)))) * inv;
    out.grad.data()[i] = (sigmoid(z) - t) * inv;
  }
  return out;
}

}  // namespace sagenet::nn
