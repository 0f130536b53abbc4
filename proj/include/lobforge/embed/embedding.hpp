#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lobforge/lob/types.hpp"
#include "lobforge/nn/tensor.hpp"

namespace lobforge::embed {

enum class VolumeScaling : std::uint8_t { zscore, minmax_global, minmax_domain };
enum class FeatureSet : std::uint8_t { f4 = 4, f8 = 8 };

VolumeScaling volume_scaling_from_string(const std::string& s);
std::string to_string(VolumeScaling v);

// Whole-sample quantity statistics, fitted on the training range only.
struct GlobalStats {
  double min_q = 0.0;
  double max_q = 0.0;
  double mean_q = 0.0;
  double std_q = 0.0;  // population
};

GlobalStats compute_global_stats(const lob::SnapshotSeries& series);

struct EmbedConfig {
  VolumeScaling volume_scaling = VolumeScaling::minmax_domain;
  FeatureSet feature_set = FeatureSet::f4;
  bool quantize_255 = true;
  std::optional<GlobalStats> global_stats;

  std::size_t columns() const { return static_cast<std::size_t>(feature_set); }
};

// Column layout (fixed; checkpoints depend on it):
//   F4: [ask_price, ask_vol, bid_price, bid_vol]
//   F8: F4 + [ask_vol_global, ask_bin_width, bid_vol_global, bid_bin_width]
inline constexpr int kColumnLayoutVersion = 1;

struct FrameMatrix {
  std::size_t rows = 0;  // D
  std::size_t cols = 0;  // C in {4, 8}
  std::vector<double> data;  // row-major D x C
  double anchor_mid = 0.0;
  std::int64_t ts_ms = 0;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Mid-relative price scaling: prices map into (0, 1], deepest level exactly 1.
struct ScaledPrices {
  std::vector<double> asks;
  std::vector<double> bids;
};
ScaledPrices scale_prices(const lob::LobSnapshot& s);

std::vector<double> scale_quantities(const std::vector<double>& q,
                                     VolumeScaling mode,
                                     const std::optional<GlobalStats>& stats);

// width[i] = |p[i+1] - p[i]| on the already-scaled ladder; last width repeats
// the previous one; D=1 gives [0].
std::vector<double> bin_widths(const std::vector<double>& prices_scaled);

FrameMatrix embed_snapshot(const lob::LobSnapshot& s, const EmbedConfig& cfg);

// L frames -> L x D x C, frame j verbatim as channel j.
nn::Tensor stack_frames(const std::vector<FrameMatrix>& frames);
// L frames -> D x (C*L); column block [j*C, (j+1)*C) is frame j.
nn::Tensor merge_frames(const std::vector<FrameMatrix>& frames);

// 8-bit grayscale PNG, one pixel per entry, rounded half-to-even. Values
// outside [0,255] raise OutOfRange unless clamp is set.
void export_frame_png(std::size_t rows, std::size_t cols, const double* data,
                      const std::string& path, bool clamp = false,
                      const std::string& meta_text = "");
void export_frame_png(const FrameMatrix& frame, const std::string& path,
                      bool clamp = false, const std::string& meta_text = "");

}  // namespace lobforge::embed
