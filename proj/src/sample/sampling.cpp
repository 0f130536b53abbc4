#include "lobforge/sample/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "lobforge/errors.hpp"
#include "lobforge/lob/parse.hpp"
#include "lobforge/log.hpp"
#include "lobforge/parallel.hpp"

namespace lobforge::sampling {

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "delta") return TargetKind::delta;
  if (s == "returns") return TargetKind::returns;
  throw ConfigError("unknown target kind '" + s + "' (delta|returns)");
}

Representation representation_from_string(const std::string& s) {
  if (s == "stacked") return Representation::stacked;
  if (s == "merged") return Representation::merged;
  throw ConfigError("unknown representation '" + s + "' (stacked|merged)");
}

std::string to_string(TargetKind k) {
  return k == TargetKind::delta ? "delta" : "returns";
}
std::string to_string(Representation r) {
  return r == Representation::stacked ? "stacked" : "merged";
}

SampleSpec SampleSpec::with_aggregation(SampleSpec base, const std::string& agg) {
  if (agg.size() < 2) throw ConfigError("bad aggregation '" + agg + "' (Nw|Ns)");
  const char suffix = agg.back();
  std::int64_t n = 0;
  try {
    n = std::stoll(agg.substr(0, agg.size() - 1));
  } catch (const std::exception&) {
    throw ConfigError("bad aggregation '" + agg + "' (Nw|Ns)");
  }
  if (n <= 0) throw ConfigError("aggregation count must be positive");
  if (suffix == 'w') {
    base.aggregation = Aggregation::window;
    base.frame_count = n;
  } else if (suffix == 's') {
    base.aggregation = Aggregation::interval;
    base.interval_ms = n * 1000;
  } else {
    throw ConfigError("aggregation suffix must be w or s");
  }
  return base;
}

std::string SampleSpec::aggregation_string() const {
  if (aggregation == Aggregation::window)
    return std::to_string(frame_count) + "w";
  return std::to_string(interval_ms / 1000) + "s";
}

bool compatible_specs(const SampleSpec& a, const SampleSpec& b) {
  return a.aggregation == b.aggregation && a.interval_ms == b.interval_ms &&
         a.frame_count == b.frame_count && a.horizon_ms == b.horizon_ms &&
         a.target_kind == b.target_kind && a.anchor == b.anchor &&
         a.representation == b.representation &&
         a.embed.volume_scaling == b.embed.volume_scaling &&
         a.embed.feature_set == b.embed.feature_set &&
         a.embed.quantize_255 == b.embed.quantize_255;
}

double make_target(double anchor_mid, double future_mid, TargetKind kind) {
  if (kind == TargetKind::delta) return future_mid - anchor_mid;
  return future_mid / anchor_mid - 1.0;
}

double decode_prediction(double pred, double anchor_mid, TargetKind kind) {
  if (kind == TargetKind::delta) return anchor_mid + pred;
  return anchor_mid * (1.0 + pred);
}

TargetScaler fit_target_scaler(const SampleSet& train) {
  if (train.samples.empty()) throw EmptySet("cannot fit scaler on empty set");
  const std::size_t k = train.target_dim();
  TargetScaler sc;
  sc.mean.assign(k, 0.0);
  sc.stdev.assign(k, 1.0);
  const double n = static_cast<double>(train.samples.size());
  for (std::size_t dim = 0; dim < k; ++dim) {
    double sum = 0.0;
    for (const auto& s : train.samples) sum += s.targets[dim];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& s : train.samples) {
      const double d = s.targets[dim] - mean;
      ss += d * d;
    }
    const double stdev = std::sqrt(ss / n);
    if (train.samples.size() >= 2 && stdev > 0.0) {
      sc.mean[dim] = mean;
      sc.stdev[dim] = stdev;
    }  // else identity for this dim
  }
  return sc;
}

std::vector<embed::FrameMatrix> embed_series(const lob::SnapshotSeries& series,
                                             const embed::EmbedConfig& cfg,
                                             unsigned threads) {
  std::vector<embed::FrameMatrix> frames(series.size());
  parallel_for(series.size(), threads, [&](std::size_t i) {
    frames[i] = embed::embed_snapshot(series.snapshots[i], cfg);
  });
  return frames;
}

namespace {

nn::Tensor assemble_input(const std::vector<const embed::FrameMatrix*>& window,
                          Representation repr) {
  std::vector<embed::FrameMatrix> copy;
  copy.reserve(window.size());
  for (const auto* f : window) copy.push_back(*f);
  return repr == Representation::stacked ? embed::stack_frames(copy)
                                         : embed::merge_frames(copy);
}

// First index with ts >= want, or -1.
std::ptrdiff_t first_at_or_after(const lob::SnapshotSeries& series,
                                 std::int64_t want, std::size_t from) {
  auto it = std::lower_bound(
      series.snapshots.begin() + static_cast<std::ptrdiff_t>(from),
      series.snapshots.end(), want,
      [](const lob::LobSnapshot& s, std::int64_t t) { return s.ts_ms < t; });
  if (it == series.snapshots.end()) return -1;
  return it - series.snapshots.begin();
}

void validate_spec(const lob::SnapshotSeries& series, const SampleSpec& spec) {
  if (spec.frame_count < 1) throw ConfigError("frame count L must be >= 1");
  if (spec.horizon_ms <= 0) throw ConfigError("horizon must be positive");
  if (series.nominal_interval_ms > 0 &&
      spec.horizon_ms < series.nominal_interval_ms)
    throw ConfigError("horizon " + std::to_string(spec.horizon_ms) +
                      " ms is shorter than the nominal snapshot interval " +
                      std::to_string(series.nominal_interval_ms) + " ms");
}

void apply_train_cap(SampleSet& set) {
  if (set.split == "train" && set.spec.max_train_samples > 0 &&
      static_cast<std::int64_t>(set.samples.size()) > set.spec.max_train_samples) {
    // earliest-N respects causality
    set.samples.resize(static_cast<std::size_t>(set.spec.max_train_samples));
  }
}

Sample finish_sample(const lob::SnapshotSeries& series, nn::Tensor input,
                     const SampleSpec& spec, std::size_t anchor_idx,
                     std::size_t anchor_mid_idx, std::size_t target_idx) {
  Sample s;
  s.input = std::move(input);
  const double anchor_mid = lob::mid_price(series[anchor_mid_idx]);
  const double future_mid = lob::mid_price(series[target_idx]);
  s.anchor_mids = {anchor_mid};
  s.targets = {make_target(anchor_mid, future_mid, spec.target_kind)};
  s.true_future_mids = {future_mid};
  s.t_anchor_ms = series[anchor_idx].ts_ms;
  s.t_target_ms = series[target_idx].ts_ms;
  return s;
}

}  // namespace

nn::Tensor window_input(const std::vector<embed::FrameMatrix>& frames,
                        const SampleSpec& spec, std::size_t anchor_idx) {
  const auto l = static_cast<std::size_t>(spec.frame_count);
  if (anchor_idx + 1 < l || anchor_idx >= frames.size())
    throw SeriesTooShort("window does not fit at anchor index " +
                         std::to_string(anchor_idx));
  std::vector<const embed::FrameMatrix*> window;
  window.reserve(l);
  for (std::size_t j = anchor_idx + 1 - l; j <= anchor_idx; ++j)
    window.push_back(&frames[j]);
  return assemble_input(window, spec.representation);
}

SampleSet window_samples(const lob::SnapshotSeries& series,
                         const SampleSpec& spec, const std::string& split) {
  validate_spec(series, spec);
  const auto l = static_cast<std::size_t>(spec.frame_count);
  if (series.size() < l + 1)
    throw SeriesTooShort("need at least L+1 snapshots, got " +
                         std::to_string(series.size()));

  SampleSet set;
  set.spec = spec;
  set.split = split;
  set.symbols = {series.symbol};
  const auto frames = embed_series(series, spec.embed);

  for (std::size_t i = l - 1; i < series.size(); ++i) {
    const std::ptrdiff_t target_idx =
        first_at_or_after(series, series[i].ts_ms + spec.horizon_ms, i + 1);
    if (target_idx < 0) continue;  // horizon beyond the tape: drop
    const std::size_t anchor_mid_idx =
        spec.anchor == Anchor::last ? i : i + 1 - l;
    set.samples.push_back(finish_sample(series,
                                        window_input(frames, spec, i), spec, i,
                                        anchor_mid_idx,
                                        static_cast<std::size_t>(target_idx)));
  }
  if (set.samples.empty())
    throw SeriesTooShort("horizon unreachable for every window");
  apply_train_cap(set);
  return set;
}

SampleSet interval_samples(const lob::SnapshotSeries& series,
                           const SampleSpec& spec, const std::string& split) {
  validate_spec(series, spec);
  if (spec.interval_ms <= 0)
    throw ConfigError("interval aggregation needs a positive interval");
  const std::int64_t t0 = series.snapshots.front().ts_ms;
  const std::int64_t span = series.snapshots.back().ts_ms - t0;
  if (span < 2 * spec.interval_ms)
    throw SeriesTooShort("series spans fewer than two intervals");

  // Border snapshots (r == k*T) belong to the earlier bucket.
  auto bucket_of = [&](std::int64_t ts) {
    const std::int64_t r = ts - t0;
    if (r == 0) return std::int64_t{0};
    return (r + spec.interval_ms - 1) / spec.interval_ms - 1;
  };

  SampleSet set;
  set.spec = spec;
  set.split = split;
  set.symbols = {series.symbol};
  const auto frames = embed_series(series, spec.embed);
  const auto l = static_cast<std::size_t>(spec.frame_count);

  const std::int64_t last_bucket = bucket_of(series.snapshots.back().ts_ms);
  std::size_t cursor = 0;
  for (std::int64_t k = 0; k <= last_bucket; ++k) {
    std::vector<std::size_t> members;
    while (cursor < series.size() && bucket_of(series[cursor].ts_ms) == k)
      members.push_back(cursor++);
    if (members.empty()) {
      ++set.skipped_empty_buckets;
      continue;
    }
    // Reduce the bucket to exactly L frames: last L, front-padded by
    // repeating the earliest member when the bucket is short.
    std::vector<const embed::FrameMatrix*> window;
    window.reserve(l);
    if (members.size() >= l) {
      for (std::size_t j = members.size() - l; j < members.size(); ++j)
        window.push_back(&frames[members[j]]);
    } else {
      for (std::size_t j = 0; j < l - members.size(); ++j)
        window.push_back(&frames[members.front()]);
      for (std::size_t m : members) window.push_back(&frames[m]);
    }
    const std::size_t anchor_idx = members.back();
    const std::ptrdiff_t target_idx = first_at_or_after(
        series, series[anchor_idx].ts_ms + spec.horizon_ms, anchor_idx + 1);
    if (target_idx < 0) continue;
    const std::size_t anchor_mid_idx =
        spec.anchor == Anchor::last
            ? anchor_idx
            : (members.size() >= l ? members[members.size() - l] : members.front());
    set.samples.push_back(
        finish_sample(series, assemble_input(window, spec.representation),
                      spec, anchor_idx, anchor_mid_idx,
                      static_cast<std::size_t>(target_idx)));
  }
  if (set.samples.empty()) throw SeriesTooShort("no interval produced a sample");
  apply_train_cap(set);
  return set;
}

SampleSet build_samples(const lob::SnapshotSeries& series,
                        const SampleSpec& spec, const std::string& split) {
  return spec.aggregation == Aggregation::window
             ? window_samples(series, spec, split)
             : interval_samples(series, spec, split);
}

SplitSets split_by_timestamp(const SampleSet& all, std::int64_t cut_ms) {
  SplitSets out;
  out.train.spec = all.spec;
  out.train.symbols = all.symbols;
  out.train.split = "train";
  out.test.spec = all.spec;
  out.test.symbols = all.symbols;
  out.test.split = "test";
  for (const auto& s : all.samples) {
    if (s.t_target_ms <= cut_ms)
      out.train.samples.push_back(s);
    else if (s.t_anchor_ms > cut_ms)
      out.test.samples.push_back(s);
    // windows straddling the cut are discarded
  }
  apply_train_cap(out.train);
  if (!out.train.samples.empty()) out.train.scaler = fit_target_scaler(out.train);
  return out;
}

SampleSet union_sets(const std::vector<SampleSet>& sets) {
  if (sets.empty()) throw EmptySet("nothing to union");
  SampleSet out;
  out.spec = sets.front().spec;
  out.split = sets.front().split;
  for (const auto& set : sets) {
    if (!compatible_specs(out.spec, set.spec))
      throw SpecMismatch("sample specs differ beyond symbol");
    if (set.split != out.split)
      throw SpecMismatch("cannot union train with test sets");
    std::vector<std::uint16_t> remap(set.symbols.size());
    for (std::size_t i = 0; i < set.symbols.size(); ++i) {
      auto it = std::find(out.symbols.begin(), out.symbols.end(), set.symbols[i]);
      if (it == out.symbols.end()) {
        out.symbols.push_back(set.symbols[i]);
        remap[i] = static_cast<std::uint16_t>(out.symbols.size() - 1);
      } else {
        remap[i] = static_cast<std::uint16_t>(it - out.symbols.begin());
      }
    }
    for (Sample s : set.samples) {
      s.symbol_idx = remap[s.symbol_idx];
      out.samples.push_back(std::move(s));
    }
  }
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return a.t_anchor_ms < b.t_anchor_ms;
                   });
  return out;
}

SampleSet pair_oneshot(const SampleSet& a, const SampleSet& b,
                       std::int64_t align_tol_ms) {
  if (!compatible_specs(a.spec, b.spec))
    throw SpecMismatch("one-shot pairing needs matching specs");
  if (a.spec.representation != Representation::stacked)
    throw SpecMismatch("one-shot pairing is defined for stacked inputs");
  if (a.samples.empty() || b.samples.empty())
    throw EmptySet("one-shot pairing needs non-empty sets");

  SampleSet out;
  out.spec = a.spec;
  out.split = a.split;
  out.symbols = {a.symbols.front(), b.symbols.front()};

  // Greedy nearest-neighbor join in time order; each b sample used once.
  std::size_t j = 0;
  std::size_t matched = 0;
  for (const auto& sa : a.samples) {
    while (j + 1 < b.samples.size() &&
           std::llabs(b.samples[j + 1].t_anchor_ms - sa.t_anchor_ms) <=
               std::llabs(b.samples[j].t_anchor_ms - sa.t_anchor_ms))
      ++j;
    const auto& sb = b.samples[j];
    if (std::llabs(sb.t_anchor_ms - sa.t_anchor_ms) > align_tol_ms) continue;
    ++matched;
    ++j;

    const auto& ia = sa.input;
    const auto& ib = sb.input;
    if (ia.shape != ib.shape)
      throw ShapeMismatch("one-shot inputs differ in shape");
    nn::Tensor input({ia.shape[0] * 2, ia.shape[1], ia.shape[2]});
    std::copy(ia.data.begin(), ia.data.end(), input.data.begin());
    std::copy(ib.data.begin(), ib.data.end(),
              input.data.begin() + ia.data.size());

    Sample s;
    s.input = std::move(input);
    s.anchor_mids = {sa.anchor_mids[0], sb.anchor_mids[0]};
    s.targets = {sa.targets[0], sb.targets[0]};
    s.true_future_mids = {sa.true_future_mids[0], sb.true_future_mids[0]};
    s.t_anchor_ms = sa.t_anchor_ms;
    s.t_target_ms = sa.t_target_ms;
    out.samples.push_back(std::move(s));
    if (j >= b.samples.size()) break;
  }

  const std::size_t denom = std::max(a.samples.size(), b.samples.size());
  const double unmatched =
      1.0 - static_cast<double>(matched) / static_cast<double>(denom);
  if (unmatched > 0.10)
    throw AlignmentGap(std::to_string(static_cast<int>(unmatched * 100)) +
                       "% of samples unmatched");
  return out;
}

}  // namespace lobforge::sampling
