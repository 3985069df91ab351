#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sagenet/common.hpp"

namespace sagenet::nn {

/// Dense row-major matrix of doubles.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v);
  Tensor2& operator+=(const Tensor2& o);
  bool all_finite() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Trainable tensor with its gradient accumulator and optimizer state.
struct ParamTensor {
  Tensor2 value;
  Tensor2 grad;
  Tensor2 m;  // momentum velocity, or Adam first moment
  Tensor2 v;  // Adam second moment

  ParamTensor() = default;
  explicit ParamTensor(Tensor2 init);
  ParamTensor(std::size_t rows, std::size_t cols) : ParamTensor(Tensor2(rows, cols)) {}

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }
  void zero_grad() { grad.fill(0.0); }
  void reset_state();
};

/// Glorot-uniform initialization for a (fan_out x fan_in) weight.
Tensor2 glorot_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng);

}  // namespace sagenet::nn
