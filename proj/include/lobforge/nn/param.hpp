#pragma once

#include <string>

#include "lobforge/nn/tensor.hpp"
#include "lobforge/rng.hpp"

namespace lobforge::nn {

// Trainable tensor with gradient and adaptive-moment state.
template <typename T>
struct ParamT {
  std::string name;
  TensorT<T> value;
  TensorT<T> grad;
  TensorT<T> moment1;
  TensorT<T> moment2;
  std::int64_t step = 0;

  ParamT() = default;
  ParamT(std::string n, TensorT<T> v) : name(std::move(n)), value(std::move(v)) {
    grad = TensorT<T>::zeros(value.shape);
    moment1 = TensorT<T>::zeros(value.shape);
    moment2 = TensorT<T>::zeros(value.shape);
  }

  void zero_grad() { grad.fill(T{0}); }
};

using Param = ParamT<float>;

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) drawn in f64 then stored as T,
// so f32 and f64 instantiations of a model share bit-compatible values.
template <typename T>
TensorT<T> seeded_init(std::vector<std::int64_t> shape, std::int64_t fan_in,
                       Xoshiro256ss& rng) {
  TensorT<T> t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(1, fan_in)));
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
  return t;
}

}  // namespace lobforge::nn
