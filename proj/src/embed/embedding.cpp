#include "lobforge/embed/embedding.hpp"

#include <cmath>

#include "lobforge/errors.hpp"
#include "lobforge/io/png.hpp"
#include "lobforge/lob/parse.hpp"

namespace lobforge::embed {

VolumeScaling volume_scaling_from_string(const std::string& s) {
  if (s == "zscore") return VolumeScaling::zscore;
  if (s == "global") return VolumeScaling::minmax_global;
  if (s == "domain") return VolumeScaling::minmax_domain;
  throw ConfigError("unknown volume scaling '" + s + "' (zscore|global|domain)");
}

std::string to_string(VolumeScaling v) {
  switch (v) {
    case VolumeScaling::zscore: return "zscore";
    case VolumeScaling::minmax_global: return "global";
    case VolumeScaling::minmax_domain: return "domain";
  }
  return "?";
}

GlobalStats compute_global_stats(const lob::SnapshotSeries& series) {
  GlobalStats st;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  bool first = true;
  for (const auto& snap : series.snapshots) {
    for (const auto* side : {&snap.asks, &snap.bids}) {
      for (const auto& lv : *side) {
        if (first) {
          st.min_q = st.max_q = lv.qty;
          first = false;
        } else {
          st.min_q = std::min(st.min_q, lv.qty);
          st.max_q = std::max(st.max_q, lv.qty);
        }
        sum += lv.qty;
        sum_sq += lv.qty * lv.qty;
        ++n;
      }
    }
  }
  if (n == 0) throw EmptySeries("no quantities to fit global stats");
  st.mean_q = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - st.mean_q * st.mean_q;
  st.std_q = std::sqrt(std::max(0.0, var));
  return st;
}

ScaledPrices scale_prices(const lob::LobSnapshot& s) {
  const double mid = lob::mid_price(s);
  const double ask_span = s.asks.back().price - mid;
  const double bid_span = s.bids.back().price - mid;
  if (!(ask_span > 0.0) || !(bid_span < 0.0))
    throw DegenerateLadder("ladder does not extend beyond the mid");

  ScaledPrices out;
  out.asks.reserve(s.asks.size());
  out.bids.reserve(s.bids.size());
  for (const auto& lv : s.asks) out.asks.push_back((lv.price - mid) / ask_span);
  for (const auto& lv : s.bids) out.bids.push_back((lv.price - mid) / bid_span);
  // The deepest level divides its own span.
  out.asks.back() = 1.0;
  out.bids.back() = 1.0;
  return out;
}

std::vector<double> scale_quantities(const std::vector<double>& q,
                                     VolumeScaling mode,
                                     const std::optional<GlobalStats>& stats) {
  std::vector<double> out(q.size());
  switch (mode) {
    case VolumeScaling::zscore: {
      if (!stats) throw MissingStats("zscore scaling needs global stats");
      if (!(stats->std_q > 0.0)) throw ZeroVariance("zscore with sigma = 0");
      for (std::size_t i = 0; i < q.size(); ++i)
        out[i] = (q[i] - stats->mean_q) / stats->std_q;
      return out;
    }
    case VolumeScaling::minmax_global: {
      if (!stats) throw MissingStats("global min-max scaling needs global stats");
      const double span = stats->max_q - stats->min_q;
      if (!(span > 0.0)) throw ZeroVariance("global max == global min");
      for (std::size_t i = 0; i < q.size(); ++i)
        out[i] = (q[i] - stats->min_q) / span;
      return out;
    }
    case VolumeScaling::minmax_domain: {
      double lo = q.empty() ? 0.0 : q[0];
      double hi = lo;
      for (double v : q) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double span = hi - lo;
      if (!(span > 0.0)) return out;  // flat side carries no distribution info
      for (std::size_t i = 0; i < q.size(); ++i) out[i] = (q[i] - lo) / span;
      return out;
    }
  }
  throw ConfigError("unreachable volume scaling mode");
}

std::vector<double> bin_widths(const std::vector<double>& prices_scaled) {
  const std::size_t d = prices_scaled.size();
  std::vector<double> out(d, 0.0);
  if (d < 2) return out;
  for (std::size_t i = 0; i + 1 < d; ++i)
    out[i] = std::abs(prices_scaled[i + 1] - prices_scaled[i]);
  out[d - 1] = out[d - 2];
  return out;
}

FrameMatrix embed_snapshot(const lob::LobSnapshot& s, const EmbedConfig& cfg) {
  const std::size_t d = s.depth();
  const std::size_t c = cfg.columns();
  if (cfg.feature_set == FeatureSet::f8 && !cfg.global_stats)
    throw MissingStats("F8 layout needs global stats for its global-scaled columns");

  FrameMatrix fm;
  fm.rows = d;
  fm.cols = c;
  fm.data.assign(d * c, 0.0);
  fm.anchor_mid = lob::mid_price(s);
  fm.ts_ms = s.ts_ms;

  const ScaledPrices prices = scale_prices(s);
  std::vector<double> ask_q(d), bid_q(d);
  for (std::size_t i = 0; i < d; ++i) {
    ask_q[i] = s.asks[i].qty;
    bid_q[i] = s.bids[i].qty;
  }
  const auto ask_vol = scale_quantities(ask_q, cfg.volume_scaling, cfg.global_stats);
  const auto bid_vol = scale_quantities(bid_q, cfg.volume_scaling, cfg.global_stats);

  for (std::size_t i = 0; i < d; ++i) {
    fm.at(i, 0) = prices.asks[i];
    fm.at(i, 1) = ask_vol[i];
    fm.at(i, 2) = prices.bids[i];
    fm.at(i, 3) = bid_vol[i];
  }
  if (cfg.feature_set == FeatureSet::f8) {
    const auto ask_vol_g =
        scale_quantities(ask_q, VolumeScaling::minmax_global, cfg.global_stats);
    const auto bid_vol_g =
        scale_quantities(bid_q, VolumeScaling::minmax_global, cfg.global_stats);
    const auto ask_w = bin_widths(prices.asks);
    const auto bid_w = bin_widths(prices.bids);
    for (std::size_t i = 0; i < d; ++i) {
      fm.at(i, 4) = ask_vol_g[i];
      fm.at(i, 5) = ask_w[i];
      fm.at(i, 6) = bid_vol_g[i];
      fm.at(i, 7) = bid_w[i];
    }
  }
  if (cfg.quantize_255)
    for (auto& v : fm.data) v *= 255.0;
  return fm;
}

namespace {

void require_uniform(const std::vector<FrameMatrix>& frames) {
  if (frames.empty()) throw ShapeMismatch("no frames to aggregate");
  for (const auto& f : frames)
    if (f.rows != frames.front().rows || f.cols != frames.front().cols)
      throw ShapeMismatch("frames differ in D or C");
}

}  // namespace

nn::Tensor stack_frames(const std::vector<FrameMatrix>& frames) {
  require_uniform(frames);
  const auto l = static_cast<std::int64_t>(frames.size());
  const auto d = static_cast<std::int64_t>(frames.front().rows);
  const auto c = static_cast<std::int64_t>(frames.front().cols);
  nn::Tensor out({l, d, c});
  std::size_t idx = 0;
  for (const auto& f : frames)
    for (double v : f.data) out[idx++] = static_cast<float>(v);
  return out;
}

nn::Tensor merge_frames(const std::vector<FrameMatrix>& frames) {
  require_uniform(frames);
  const std::size_t l = frames.size();
  const std::size_t d = frames.front().rows;
  const std::size_t c = frames.front().cols;
  nn::Tensor out({static_cast<std::int64_t>(d), static_cast<std::int64_t>(c * l)});
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t k = 0; k < c; ++k)
        out[r * (c * l) + j * c + k] = static_cast<float>(frames[j].at(r, k));
  return out;
}

void export_frame_png(std::size_t rows, std::size_t cols, const double* data,
                      const std::string& path, bool clamp,
                      const std::string& meta_text) {
  std::vector<std::uint8_t> pixels(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    double v = data[i];
    if (v < 0.0 || v > 255.0) {
      if (!clamp)
        throw OutOfRange("pixel value " + std::to_string(v) +
                         " outside [0,255]; pass clamp to saturate");
      v = std::min(255.0, std::max(0.0, v));
    }
    pixels[i] = static_cast<std::uint8_t>(std::nearbyint(v));  // ties to even
  }
  io::write_png_gray8(path, cols, rows, pixels.data(), meta_text);
}

void export_frame_png(const FrameMatrix& frame, const std::string& path,
                      bool clamp, const std::string& meta_text) {
  export_frame_png(frame.rows, frame.cols, frame.data.data(), path, clamp,
                   meta_text);
}

}  // namespace lobforge::embed
