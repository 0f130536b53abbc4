#pragma once

#include <vector>

#include "lobforge/models/model.hpp"
#include "lobforge/sample/sampling.hpp"

namespace lobforge::models {

struct TrainConfig {
  std::int64_t epochs = 50;
  std::int64_t batch = 32;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean loss over the epoch's batches
};

// Batches sample inputs into NCHW: stacked {L,D,C} -> {N,L,D,C},
// merged {D,W} -> {N,1,D,W}.
nn::Tensor make_batch(const sampling::SampleSet& set,
                      const std::vector<std::size_t>& indices);
nn::Tensor make_scaled_targets(const sampling::SampleSet& set,
                               const std::vector<std::size_t>& indices);

// Minimizes MSE on scaled targets with adaptive-moment steps; deterministic
// given the seed. Persistence models are a no-op with a constant history.
TrainHistory train_model(Model& model, const sampling::SampleSet& train,
                         const TrainConfig& cfg);

// Target-space prediction (scaler-inverted model output; zero for the
// persistence baseline).
std::vector<double> predict_raw(Model& model,
                                const sampling::TargetScaler& scaler,
                                const sampling::Sample& sample);
// Decoded mid-price forecast(s).
std::vector<double> predict_mids(Model& model,
                                 const sampling::TargetScaler& scaler,
                                 const sampling::Sample& sample,
                                 sampling::TargetKind kind);

struct EvalResult {
  std::vector<double> actual_mids;
  std::vector<double> forecast_mids;
  std::vector<std::uint16_t> symbol_idx;
};
// Batched inference over a whole set; per-asset pairs are flattened in
// sample order (asset-major within a sample).
EvalResult evaluate(Model& model, const sampling::TargetScaler& scaler,
                    const sampling::SampleSet& set, std::size_t batch = 256);

}  // namespace lobforge::models
