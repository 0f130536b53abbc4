#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lobforge/errors.hpp"

namespace lobforge::nn {

// Dense row-major tensor. f32 is the storage type across the pipeline;
// the f64 instantiation exists for finite-difference shadow runs.
template <typename T>
struct TensorT {
  std::vector<std::int64_t> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<std::int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), T{});
  }

  static TensorT zeros(std::vector<std::int64_t> s) { return TensorT(std::move(s)); }

  static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) {
      if (d <= 0) throw ShapeMismatch("non-positive dimension");
      n *= d;
    }
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  std::size_t ndim() const { return shape.size(); }
  std::int64_t dim(std::size_t i) const { return shape[i]; }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  // NCHW addressing for the conv kernels.
  T& at4(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
    return data[static_cast<std::size_t>(((n * shape[1] + c) * shape[2] + h) * shape[3] + w)];
  }
  T at4(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const {
    return data[static_cast<std::size_t>(((n * shape[1] + c) * shape[2] + h) * shape[3] + w)];
  }

  TensorT reshaped(std::vector<std::int64_t> new_shape) const {
    if (numel_of(new_shape) != numel())
      throw ShapeMismatch("reshape changes element count");
    TensorT out;
    out.shape = std::move(new_shape);
    out.data = data;
    return out;
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

std::string shape_string(const std::vector<std::int64_t>& shape);

template <typename T>
void require_shape(const TensorT<T>& t, const std::vector<std::int64_t>& want,
                   const char* what) {
  if (t.shape != want)
    throw ShapeMismatch(std::string(what) + ": expected " + shape_string(want) +
                        ", got " + shape_string(t.shape));
}

}  // namespace lobforge::nn
