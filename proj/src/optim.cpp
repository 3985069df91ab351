#include "sagenet/optim.hpp"

#include <cmath>
#include <string>

namespace sagenet {

OptimKind parse_optim_kind(std::string_view s) {
  if (s == "sgd_momentum" || s == "sgd") return OptimKind::sgd_momentum;
  if (s == "adam") return OptimKind::adam;
  throw Error("unknown optimizer '" + std::string(s) + "'");
}

std::string_view optim_kind_name(OptimKind k) { return k == OptimKind::adam ? "adam" : "sgd_momentum"; }

void OptimConfig::validate() const {
  if (!(lr > 0.0)) throw Error("learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw Error("momentum must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw Error("Adam betas must be in [0, 1)");
  if (!(eps > 0.0)) throw Error("Adam epsilon must be positive");
  if (batch_size == 0) throw Error("batch_size must be positive");
  if (!(plateau.factor > 1.0)) throw Error("plateau factor must exceed 1");
  if (plateau.patience < 1 || early_stop_patience < 1) throw Error("patience values must be at least 1");
  if (max_epochs == 0) throw Error("max_epochs must be positive");
}

void sgd_momentum_step(std::span<nn::ParamTensor* const> params, double lr, double momentum) {
  for (auto* p : params) {
    auto& w = p->value.data();
    auto& g = p->grad.data();
    auto& v = p->m.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum * v[i] + g[i];
      w[i] -= lr * v[i];
      g[i] = 0.0;
    }
  }
}

void adam_step(std::span<nn::ParamTensor* const> params, std::size_t step, double lr, double beta1, double beta2,
               double eps) {
  if (step == 0) throw Error("adam_step: step count is 1-based");
  const double t = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (auto* p : params) {
    auto& w = p->value.data();
    auto& g = p->grad.data();
    auto& m = p->m.data();
    auto& v = p->v.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      g[i] = 0.0;
    }
  }
}

void Optimizer::step(std::span<nn::ParamTensor* const> params, double lr) {
  ++steps_;
  if (config_.kind == OptimKind::adam)
    adam_step(params, steps_, lr, config_.beta1, config_.beta2, config_.eps);
  else
    sgd_momentum_step(params, lr, config_.momentum);
}

}  // namespace sagenet
