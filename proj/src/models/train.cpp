#include "lobforge/models/train.hpp"

#include <algorithm>

#include "lobforge/errors.hpp"
#include "lobforge/log.hpp"
#include "lobforge/nn/loss.hpp"
#include "lobforge/nn/optim.hpp"
#include "lobforge/rng.hpp"

namespace lobforge::models {

namespace {

std::vector<std::int64_t> batch_shape(const nn::Tensor& sample_input,
                                      std::size_t n) {
  const auto& s = sample_input.shape;
  if (s.size() == 3)
    return {static_cast<std::int64_t>(n), s[0], s[1], s[2]};
  if (s.size() == 2)
    return {static_cast<std::int64_t>(n), 1, s[0], s[1]};
  throw ShapeMismatch("sample input must be 2-d (merged) or 3-d (stacked)");
}

}  // namespace

nn::Tensor make_batch(const sampling::SampleSet& set,
                      const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw EmptySet("empty batch");
  const auto& first = set.samples[indices.front()].input;
  nn::Tensor out(batch_shape(first, indices.size()));
  const std::size_t stride = static_cast<std::size_t>(first.numel());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& in = set.samples[indices[i]].input;
    if (in.shape != first.shape) throw ShapeMismatch("inhomogeneous batch");
    std::copy(in.data.begin(), in.data.end(), out.data.begin() + i * stride);
  }
  return out;
}

nn::Tensor make_scaled_targets(const sampling::SampleSet& set,
                               const std::vector<std::size_t>& indices) {
  const std::size_t k = set.target_dim();
  nn::Tensor out({static_cast<std::int64_t>(indices.size()),
                  static_cast<std::int64_t>(k)});
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t d = 0; d < k; ++d)
      out[i * k + d] = static_cast<float>(
          set.scaler.apply(set.samples[indices[i]].targets[d], d));
  return out;
}

TrainHistory train_model(Model& model, const sampling::SampleSet& train,
                         const TrainConfig& cfg) {
  if (train.samples.empty()) throw EmptySet("training set is empty");
  if (!train.scaler.fitted())
    throw ConfigError("target scaler must be fitted before training");
  if (static_cast<std::size_t>(train.target_dim()) !=
      static_cast<std::size_t>(model.arch().output_dim))
    throw ShapeMismatch("target dim does not match model output dim");

  TrainHistory history;
  const std::size_t n = train.samples.size();
  auto params = model.params();

  if (model.arch().kind == ArchKind::persistence || params.empty()) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const auto targets = make_scaled_targets(train, all);
    nn::Tensor zeros(targets.shape);
    const double loss = nn::mse_loss(zeros, targets).loss;
    history.epoch_loss.assign(static_cast<std::size_t>(cfg.epochs), loss);
    return history;
  }

  nn::AdamConfig adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps};
  Xoshiro256ss shuffle_rng(cfg.seed ^ 0xA5E11BD1DF84C3ULL);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const std::size_t batch = static_cast<std::size_t>(std::max<std::int64_t>(1, cfg.batch));
  for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::vector<std::size_t> idx(order.begin() + start, order.begin() + end);
      const nn::Tensor x = make_batch(train, idx);
      const nn::Tensor y = make_scaled_targets(train, idx);
      nn::zero_grads(params);
      const nn::Tensor pred = model.forward(x);
      auto mse = nn::mse_loss(pred, y);
      model.backward(mse.grad);
      nn::adam_update(params, adam);
      loss_sum += mse.loss * static_cast<double>(idx.size());
    }
    history.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    log::debug("epoch ", epoch, " loss ", history.epoch_loss.back());
  }
  return history;
}

std::vector<double> predict_raw(Model& model,
                                const sampling::TargetScaler& scaler,
                                const sampling::Sample& sample) {
  const std::size_t k = static_cast<std::size_t>(model.arch().output_dim);
  if (model.arch().kind == ArchKind::persistence)
    return std::vector<double>(k, 0.0);  // no-change forecast by definition

  sampling::SampleSet tmp;
  tmp.samples.push_back(sample);
  const nn::Tensor out = model.forward(make_batch(tmp, {0}));
  std::vector<double> raw(k);
  for (std::size_t d = 0; d < k; ++d)
    raw[d] = scaler.fitted() ? scaler.invert(out[d], d)
                             : static_cast<double>(out[d]);
  return raw;
}

std::vector<double> predict_mids(Model& model,
                                 const sampling::TargetScaler& scaler,
                                 const sampling::Sample& sample,
                                 sampling::TargetKind kind) {
  const auto raw = predict_raw(model, scaler, sample);
  std::vector<double> mids(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d)
    mids[d] = sampling::decode_prediction(raw[d], sample.anchor_mids[d], kind);
  return mids;
}

EvalResult evaluate(Model& model, const sampling::TargetScaler& scaler,
                    const sampling::SampleSet& set, std::size_t batch) {
  if (set.samples.empty()) throw EmptySet("nothing to evaluate");
  EvalResult res;
  const std::size_t k = set.target_dim();
  const bool persistence = model.arch().kind == ArchKind::persistence;

  for (std::size_t start = 0; start < set.samples.size(); start += batch) {
    const std::size_t end = std::min(set.samples.size(), start + batch);
    std::vector<std::size_t> idx(end - start);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
    nn::Tensor out;
    if (!persistence) out = model.forward(make_batch(set, idx));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto& s = set.samples[idx[i]];
      for (std::size_t d = 0; d < k; ++d) {
        double raw = 0.0;
        if (!persistence) {
          const float y = out[i * k + d];
          raw = scaler.fitted() ? scaler.invert(y, d) : static_cast<double>(y);
        }
        res.actual_mids.push_back(s.true_future_mids[d]);
        res.forecast_mids.push_back(sampling::decode_prediction(
            raw, s.anchor_mids[d], set.spec.target_kind));
        res.symbol_idx.push_back(k == 1 ? s.symbol_idx
                                        : static_cast<std::uint16_t>(d));
      }
    }
  }
  return res;
}

}  // namespace lobforge::models
