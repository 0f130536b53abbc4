#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lobforge/embed/embedding.hpp"
#include "lobforge/lob/types.hpp"
#include "lobforge/nn/tensor.hpp"

namespace lobforge::sampling {

enum class Aggregation : std::uint8_t { window, interval };
enum class TargetKind : std::uint8_t { delta, returns };
enum class Anchor : std::uint8_t { last, first };
enum class Representation : std::uint8_t { stacked, merged };

TargetKind target_kind_from_string(const std::string& s);
Representation representation_from_string(const std::string& s);
std::string to_string(TargetKind k);
std::string to_string(Representation r);

struct SampleSpec {
  Aggregation aggregation = Aggregation::window;
  std::int64_t interval_ms = 0;  // interval aggregation bucket length
  std::int64_t frame_count = 30;  // L
  std::int64_t horizon_ms = 1000;
  TargetKind target_kind = TargetKind::delta;
  Anchor anchor = Anchor::last;
  Representation representation = Representation::stacked;
  embed::EmbedConfig embed;
  // Earliest-N cap applied to train splits; 0 disables.
  std::int64_t max_train_samples = 5000;

  // Parses "30w" (window of 30) or "5s" (5-second buckets).
  static SampleSpec with_aggregation(SampleSpec base, const std::string& agg);
  std::string aggregation_string() const;
};

// Specs must agree on everything that shapes tensors/targets to be merged.
bool compatible_specs(const SampleSpec& a, const SampleSpec& b);

struct Sample {
  nn::Tensor input;  // stacked LxDxC (or (2L)xDxC one-shot) or merged Dx(C*L)
  std::vector<double> anchor_mids;       // one per target dim
  std::vector<double> targets;           // delta or returns per asset
  std::vector<double> true_future_mids;  // decode(target_k, anchor_k)
  std::int64_t t_anchor_ms = 0;
  std::int64_t t_target_ms = 0;
  std::uint16_t symbol_idx = 0;

  double anchor_mid() const { return anchor_mids.front(); }
  double target() const { return targets.front(); }
  double true_future_mid() const { return true_future_mids.front(); }
};

struct TargetScaler {
  std::vector<double> mean;  // per target dim
  std::vector<double> stdev;

  bool fitted() const { return !mean.empty(); }
  double apply(double x, std::size_t dim = 0) const {
    return (x - mean[dim]) / stdev[dim];
  }
  double invert(double y, std::size_t dim = 0) const {
    return y * stdev[dim] + mean[dim];
  }
};

struct SampleSet {
  SampleSpec spec;
  std::vector<std::string> symbols;  // symbol_idx -> name
  std::vector<Sample> samples;
  TargetScaler scaler;
  std::string split = "train";  // train | test
  std::int64_t skipped_empty_buckets = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t target_dim() const {
    return samples.empty() ? 1 : samples.front().targets.size();
  }
};

double make_target(double anchor_mid, double future_mid, TargetKind kind);
double decode_prediction(double pred, double anchor_mid, TargetKind kind);

// Population-std standardizer; constant targets degrade to the identity.
TargetScaler fit_target_scaler(const SampleSet& train);

// Embeds every snapshot once; samplers and the backtest share the cache.
// Thread count never changes the result (pure per-snapshot work).
std::vector<embed::FrameMatrix> embed_series(const lob::SnapshotSeries& series,
                                             const embed::EmbedConfig& cfg,
                                             unsigned threads = 1);

// Input tensor for the window ending at anchor_idx (stride-1 rolling window).
nn::Tensor window_input(const std::vector<embed::FrameMatrix>& frames,
                        const SampleSpec& spec, std::size_t anchor_idx);

SampleSet window_samples(const lob::SnapshotSeries& series,
                         const SampleSpec& spec,
                         const std::string& split = "train");

SampleSet interval_samples(const lob::SnapshotSeries& series,
                           const SampleSpec& spec,
                           const std::string& split = "train");

// Dispatches on spec.aggregation.
SampleSet build_samples(const lob::SnapshotSeries& series,
                        const SampleSpec& spec,
                        const std::string& split = "train");

// train: targets at or before cut_ms; test: anchors strictly after.
struct SplitSets {
  SampleSet train;
  SampleSet test;
};
SplitSets split_by_timestamp(const SampleSet& all, std::int64_t cut_ms);

// Time-interleaved union keeping per-sample symbol tags.
SampleSet union_sets(const std::vector<SampleSet>& sets);

// Channel-concatenated inputs with per-asset 2-vector targets; stacked only.
// Samples are matched by anchor timestamp within align_tol_ms.
SampleSet pair_oneshot(const SampleSet& a, const SampleSet& b,
                       std::int64_t align_tol_ms);

}  // namespace lobforge::sampling
