#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lobforge/lob/types.hpp"

namespace lobforge::synth {

enum class TapeKind : std::uint8_t { flat, drift, meanrev };

TapeKind tape_kind_from_string(const std::string& s);
std::string to_string(TapeKind k);

struct TapeConfig {
  TapeKind kind = TapeKind::drift;
  std::string symbol = "SYNUSDT";
  std::size_t snapshots = 1000;
  std::size_t depth = 10;
  std::int64_t t0_ms = 1700000000000;
  std::int64_t interval_ms = 200;
  double base_price = 100.0;
  double tick = 0.01;            // ladder spacing; spread == tick
  double drift_per_step = 0.02;  // drift kind only
  double noise = 0.0;            // stddev of per-step mid noise, USD
  double mean_rev = 0.05;        // pull strength, meanrev kind
  double trade_rate = 1.0;       // prints per step (expected)
  double trade_band_ticks = 8.0;  // print dispersion around the mid
  std::uint64_t seed = 42;
};

struct SyntheticTape {
  lob::SnapshotSeries series;
  std::vector<lob::TradeEvent> trades;
};

// Deterministic given the config; quantities vary per level so domain
// min-max scaling has structure to work with.
SyntheticTape generate_tape(const TapeConfig& cfg);

}  // namespace lobforge::synth
