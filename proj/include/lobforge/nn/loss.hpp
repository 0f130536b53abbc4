#pragma once

#include "lobforge/nn/tensor.hpp"

namespace lobforge::nn {

// Mean squared error over all elements; gradient 2(pred - target)/(N*K).
template <typename T>
struct MseResult {
  double loss = 0.0;
  TensorT<T> grad;
};

template <typename T>
MseResult<T> mse_loss(const TensorT<T>& pred, const TensorT<T>& target) {
  if (pred.shape != target.shape)
    throw ShapeMismatch("mse_loss shapes differ: " + shape_string(pred.shape) +
                        " vs " + shape_string(target.shape));
  MseResult<T> res;
  res.grad = TensorT<T>(pred.shape);
  const double count = static_cast<double>(pred.numel());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    acc += d * d;
    res.grad[i] = static_cast<T>(2.0 * d / count);
  }
  res.loss = acc / count;
  return res;
}

}  // namespace lobforge::nn
