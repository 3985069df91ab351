#pragma once

#include <span>
#include <string_view>

#include "sagenet/tensor.hpp"

namespace sagenet {

enum class OptimKind { sgd_momentum, adam };

OptimKind parse_optim_kind(std::string_view s);
std::string_view optim_kind_name(OptimKind k);

struct PlateauConfig {
  double factor = 10.0;
  std::size_t patience = 5;
  bool enabled = true;
};

struct OptimConfig {
  OptimKind kind = OptimKind::sgd_momentum;
  double lr = 0.001;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 16;
  PlateauConfig plateau;
  std::size_t early_stop_patience = 10;
  std::size_t max_epochs = 100;

  void validate() const;
};

/// v <- mu v + g; w <- w - lr v; gradients are zeroed afterwards.
void sgd_momentum_step(std::span<nn::ParamTensor* const> params, double lr, double momentum = 0.9);

/// Bias-corrected Adam; `step` is the 1-based update count. Gradients are
/// zeroed afterwards.
void adam_step(std::span<nn::ParamTensor* const> params, std::size_t step, double lr = 0.001, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

/// Dispatches to the configured update rule and tracks the step count.
class Optimizer {
 public:
  explicit Optimizer(const OptimConfig& config) : config_(config) { config_.validate(); }

  void step(std::span<nn::ParamTensor* const> params, double lr);
  std::size_t steps_taken() const { return steps_; }

 private:
  OptimConfig config_;
  std::size_t steps_ = 0;
};

}  // namespace sagenet
