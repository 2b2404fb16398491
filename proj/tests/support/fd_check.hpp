#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "jobml/tensor.hpp"

namespace testsupport {

// Central finite differences of a scalar function with respect to one tensor.
template <typename S>
jobml::Tensor<S> finite_diff(const std::function<S(const jobml::Tensor<S>&)>& f,
                             jobml::Tensor<S> x, S h = S(1e-5)) {
  jobml::Tensor<S> g = jobml::Tensor<S>::zeros(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const S orig = x.data()[i];
    x.data()[i] = orig + h;
    const S up = f(x);
    x.data()[i] = orig - h;
    const S down = f(x);
    x.data()[i] = orig;
    g.data()[i] = (up - down) / (S(2) * h);
  }
  return g;
}

struct GradCheckResult {
  bool ok = true;
  double worst_abs_diff = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;

  std::string describe() const {
    return "worst |analytic-numeric| = " + std::to_string(worst_abs_diff) + " at flat index " +
           std::to_string(worst_index) + " (analytic " + std::to_string(analytic_at_worst) +
           ", numeric " + std::to_string(numeric_at_worst) + ")";
  }
};

template <typename S>
GradCheckResult compare_grads(const jobml::Tensor<S>& analytic, const jobml::Tensor<S>& numeric,
                              double rtol = 1e-4, double atol = 1e-6) {
  GradCheckResult r;
  for (std::size_t i = 0; i < analytic.numel(); ++i) {
    const double a = static_cast<double>(analytic.values()[i]);
    const double n = static_cast<double>(numeric.values()[i]);
    const double diff = std::abs(a - n);
    const double tol = atol + rtol * std::max(std::abs(a), std::abs(n));
    if (diff > r.worst_abs_diff) {
      r.worst_abs_diff = diff;
      r.worst_index = i;
      r.analytic_at_worst = a;
      r.numeric_at_worst = n;
    }
    if (diff > tol) r.ok = false;
  }
  return r;
}

}  // namespace testsupport
