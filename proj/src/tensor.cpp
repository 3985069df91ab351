#include "sagenet/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace sagenet::nn {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error("tensor data length does not match its shape");
}

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error("ragged tensor literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor2(r, c, std::move(data));
}

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor2& Tensor2::operator+=(const Tensor2& o) {
  if (!same_shape(o)) throw Error("tensor shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

bool Tensor2::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

ParamTensor::ParamTensor(Tensor2 init)
    : value(std::move(init)),
      grad(value.rows(), value.cols()),
      m(value.rows(), value.cols()),
      v(value.rows(), value.cols()) {}

void ParamTensor::reset_state() {
  m.fill(0.0);
  v.fill(0.0);
}

Tensor2 glorot_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor2 w(fan_out, fan_in);
  for (double& x : w.data()) x = (2.0 * uniform_unit(rng) - 1.0) * limit;
  return w;
}

}  // namespace sagenet::nn
