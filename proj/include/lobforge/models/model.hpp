#pragma once

#include <memory>
#include <vector>

#include "lobforge/models/arch.hpp"
#include "lobforge/nn/layers.hpp"

namespace lobforge::models {

template <typename T>
class ModelT {
 public:
  explicit ModelT(ArchSpec arch) : arch_(std::move(arch)) {}
  virtual ~ModelT() = default;

  // input: stacked {N, Cin, D, C} or merged {N, 1, D, C*L}; never reshaped
  // silently — a representation mismatch throws.
  virtual nn::TensorT<T> forward(const nn::TensorT<T>& input) = 0;
  virtual void backward(const nn::TensorT<T>& dpred) = 0;
  virtual void collect_params(std::vector<nn::ParamT<T>*>& out) {}

  std::vector<nn::ParamT<T>*> params() {
    std::vector<nn::ParamT<T>*> out;
    collect_params(out);
    return out;
  }

  const ArchSpec& arch() const { return arch_; }

  void check_input(const nn::TensorT<T>& input) const {
    if (arch_.kind == ArchKind::persistence) {
      if (input.ndim() != 4) throw ShapeMismatch("model input must be batched NCHW");
      return;
    }
    const std::int64_t cin = arch_.resolved_input_channels();
    const bool merged = arch_.representation() == sampling::Representation::merged;
    const std::int64_t want_h = arch_.depth;
    const std::int64_t want_w = merged ? arch_.features * arch_.frames : arch_.features;
    if (input.ndim() != 4 || input.shape[1] != cin || input.shape[2] != want_h ||
        input.shape[3] != want_w)
      throw ShapeMismatch(
          to_string(arch_.kind) + " expects {N," + std::to_string(cin) + "," +
          std::to_string(want_h) + "," + std::to_string(want_w) + "} (" +
          sampling::to_string(arch_.representation()) + "), got " +
          nn::shape_string(input.shape));
  }

 protected:
  ArchSpec arch_;
};

using Model = ModelT<float>;
using Model64 = ModelT<double>;

template <typename T>
std::unique_ptr<ModelT<T>> build_model(const ArchSpec& arch, std::uint64_t seed);

extern template std::unique_ptr<ModelT<float>> build_model<float>(const ArchSpec&, std::uint64_t);
extern template std::unique_ptr<ModelT<double>> build_model<double>(const ArchSpec&, std::uint64_t);

}  // namespace lobforge::models
