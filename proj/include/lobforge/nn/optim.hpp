#pragma once

#include <cmath>
#include <vector>

#include "lobforge/nn/param.hpp"

namespace lobforge::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected adaptive-moment step; state lives on the param.
template <typename T>
void adam_update(std::vector<ParamT<T>*>& params, const AdamConfig& cfg) {
  for (ParamT<T>* p : params) {
    p->step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      const double g = static_cast<double>(p->grad[i]);
      const double m = cfg.beta1 * static_cast<double>(p->moment1[i]) + (1.0 - cfg.beta1) * g;
      const double v = cfg.beta2 * static_cast<double>(p->moment2[i]) + (1.0 - cfg.beta2) * g * g;
      p->moment1[i] = static_cast<T>(m);
      p->moment2[i] = static_cast<T>(v);
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p->value[i] = static_cast<T>(static_cast<double>(p->value[i]) -
                                   cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
    }
  }
}

template <typename T>
void zero_grads(std::vector<ParamT<T>*>& params) {
  for (ParamT<T>* p : params) p->zero_grad();
}

}  // namespace lobforge::nn
