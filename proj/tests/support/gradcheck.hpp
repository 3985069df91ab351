#pragma once

// Central finite differences against analytic gradients.

#include <algorithm>
#include <cmath>
#include <functional>

#include "sagenet/tensor.hpp"

namespace gradcheck {

using sagenet::nn::Tensor2;

inline constexpr double kEps = 1e-5;

/// |a - n| / max(|a|, |n|, floor). The floor keeps round-off on gradients
/// that are zero in exact arithmetic from reading as a large relative error:
/// at eps = 1e-5 one ulp of an O(10) loss shifts a central difference by
/// about 1e-10.
inline double rel_error(double a, double n, double floor = 1e-5) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

/// (f(x + eps e_i) - f(x - eps e_i)) / 2 eps for every entry of x. x is
/// restored before returning.
inline Tensor2 numeric(Tensor2& x, const std::function<double()>& f, double eps = kEps) {
  Tensor2 g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + eps;
    const double up = f();
    x.data()[i] = saved - eps;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * eps);
  }
  return g;
}

inline double max_rel_error(const Tensor2& analytic, const Tensor2& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, rel_error(analytic.data()[i], numeric.data()[i]));
  return worst;
}

/// Weighted sum of an op output, sum_ij w_ij y_ij, so that the upstream
/// gradient is an arbitrary dense matrix.
inline double project(const Tensor2& y, const Tensor2& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * w.data()[i];
  return s;
}

}  // namespace gradcheck
