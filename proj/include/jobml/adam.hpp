#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "jobml/error.hpp"
#include "jobml/tensor.hpp"

namespace jobml {

template <typename S>
struct AdamConfig {
  S lr = S(1e-3);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S epsilon = S(1e-8);
};

// First/second moment buffers for one parameter tensor.
template <typename S>
struct AdamSlot {
  Tensor<S> m;
  Tensor<S> v;
};

// Optimizer state across all parameters; the step counter is shared and is
// incremented before bias correction, so the first update uses t = 1.
template <typename S>
class AdamState {
 public:
  AdamState() = default;

  AdamState(AdamConfig<S> config, const std::vector<std::vector<std::size_t>>& shapes)
      : config_(config) {
    slots_.reserve(shapes.size());
    for (const auto& shape : shapes) slots_.push_back({Tensor<S>::zeros(shape), Tensor<S>::zeros(shape)});
  }

  const AdamConfig<S>& config() const { return config_; }
  std::size_t step_count() const { return t_; }
  std::size_t slot_count() const { return slots_.size(); }
  const AdamSlot<S>& slot(std::size_t i) const { return slots_[i]; }

  // One update over all parameters. `params[i]` and `grads[i]` must match the
  // shape the state was built with.
  void step(const std::vector<Tensor<S>*>& params, const std::vector<const Tensor<S>*>& grads) {
    if (params.size() != slots_.size() || grads.size() != slots_.size())
      throw ValidationError("adam: parameter/gradient count does not match optimizer state");
    ++t_;
    const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(config_.beta1), static_cast<double>(t_)));
    const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(config_.beta2), static_cast<double>(t_)));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      Tensor<S>& p = *params[i];
      const Tensor<S>& g = *grads[i];
      require_same_shape(p, g, "adam");
      require_same_shape(p, slots_[i].m, "adam");
      Tensor<S>& m = slots_[i].m;
      Tensor<S>& v = slots_[i].v;
      for (std::size_t j = 0; j < p.numel(); ++j) {
        m[j] = config_.beta1 * m[j] + (S(1) - config_.beta1) * g[j];
        v[j] = config_.beta2 * v[j] + (S(1) - config_.beta2) * g[j] * g[j];
        const S m_hat = m[j] / bc1;
        const S v_hat = v[j] / bc2;
        p[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      }
    }
  }

 private:
  AdamConfig<S> config_;
  std::vector<AdamSlot<S>> slots_;
  std::size_t t_ = 0;
};

}  // namespace jobml
