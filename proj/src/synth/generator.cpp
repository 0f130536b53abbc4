#include "lobforge/synth/generator.hpp"

#include <cmath>

#include "lobforge/errors.hpp"
#include "lobforge/rng.hpp"

namespace lobforge::synth {

TapeKind tape_kind_from_string(const std::string& s) {
  if (s == "flat") return TapeKind::flat;
  if (s == "drift") return TapeKind::drift;
  if (s == "meanrev") return TapeKind::meanrev;
  throw ConfigError("unknown tape kind '" + s + "' (flat|drift|meanrev)");
}

std::string to_string(TapeKind k) {
  switch (k) {
    case TapeKind::flat: return "flat";
    case TapeKind::drift: return "drift";
    case TapeKind::meanrev: return "meanrev";
  }
  return "?";
}

SyntheticTape generate_tape(const TapeConfig& cfg) {
  if (cfg.snapshots < 2) throw ConfigError("need at least 2 snapshots");
  if (cfg.depth < 1) throw ConfigError("depth must be >= 1");
  if (!(cfg.tick > 0.0) || !(cfg.base_price > cfg.tick * (cfg.depth + 2)))
    throw ConfigError("base price too small for the ladder");

  Xoshiro256ss rng(cfg.seed);
  SyntheticTape out;
  out.series.symbol = cfg.symbol;
  out.series.nominal_interval_ms = cfg.interval_ms;
  out.series.snapshots.reserve(cfg.snapshots);

  double mid = cfg.base_price;
  for (std::size_t i = 0; i < cfg.snapshots; ++i) {
    switch (cfg.kind) {
      case TapeKind::flat:
        break;
      case TapeKind::drift:
        if (i > 0) mid += cfg.drift_per_step;
        break;
      case TapeKind::meanrev:
        if (i > 0) mid += cfg.mean_rev * (cfg.base_price - mid) +
                          cfg.tick * rng.normal();
        break;
    }
    if (cfg.noise > 0.0 && cfg.kind != TapeKind::flat) mid += cfg.noise * rng.normal();
    mid = std::max(mid, cfg.tick * (cfg.depth + 2));

    lob::LobSnapshot s;
    s.ts_ms = cfg.t0_ms + static_cast<std::int64_t>(i) * cfg.interval_ms;
    s.symbol = cfg.symbol;
    const double half = cfg.tick / 2.0;
    s.asks.reserve(cfg.depth);
    s.bids.reserve(cfg.depth);
    for (std::size_t d = 0; d < cfg.depth; ++d) {
      const double offs = half + cfg.tick * static_cast<double>(d);
      s.asks.push_back({mid + offs, rng.uniform(0.5, 5.0)});
      s.bids.push_back({mid - offs, rng.uniform(0.5, 5.0)});
    }
    out.series.snapshots.push_back(std::move(s));

    if (cfg.trade_rate > 0.0 && i > 0) {
      // Prints land in (t_{i-1}, t_i]; prices straddle the book top so both
      // maker sides can be hit.
      const std::size_t whole = static_cast<std::size_t>(cfg.trade_rate);
      const double frac = cfg.trade_rate - static_cast<double>(whole);
      std::size_t prints = whole + (rng.uniform01() < frac ? 1 : 0);
      for (std::size_t p = 0; p < prints; ++p) {
        lob::TradeEvent t;
        t.ts_ms = out.series.snapshots[i - 1].ts_ms +
                  1 + static_cast<std::int64_t>(rng.below(
                          static_cast<std::uint64_t>(cfg.interval_ms)));
        t.symbol = cfg.symbol;
        t.price = mid + rng.uniform(-cfg.trade_band_ticks * cfg.tick,
                                    cfg.trade_band_ticks * cfg.tick);
        t.qty = rng.uniform(0.01, 1.0);
        t.side = rng.next() & 1 ? lob::TakerSide::buy : lob::TakerSide::sell;
        out.trades.push_back(std::move(t));
      }
    }
  }
  std::stable_sort(out.trades.begin(), out.trades.end(),
                   [](const lob::TradeEvent& a, const lob::TradeEvent& b) {
                     return a.ts_ms < b.ts_ms;
                   });
  return out;
}

}  // namespace lobforge::synth
