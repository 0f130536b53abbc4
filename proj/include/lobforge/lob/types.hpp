#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lobforge::lob {

struct Level {
  double price = 0.0;
  double qty = 0.0;
  bool operator==(const Level&) const = default;
};

// One timestamped depth-D book state. asks ascending, bids descending by
// price; both sides the same depth; best ask strictly above best bid.
struct LobSnapshot {
  std::int64_t ts_ms = 0;
  std::string symbol;
  std::vector<Level> asks;
  std::vector<Level> bids;

  std::size_t depth() const { return asks.size(); }
  double best_ask() const { return asks.front().price; }
  double best_bid() const { return bids.front().price; }
  bool operator==(const LobSnapshot&) const = default;
};

enum class TakerSide : std::uint8_t { buy, sell };

struct TradeEvent {
  std::int64_t ts_ms = 0;
  std::string symbol;
  double price = 0.0;
  double qty = 0.0;
  TakerSide side = TakerSide::buy;
};

struct SnapshotSeries {
  std::string symbol;
  std::vector<LobSnapshot> snapshots;
  std::int64_t nominal_interval_ms = 0;

  std::size_t size() const { return snapshots.size(); }
  const LobSnapshot& operator[](std::size_t i) const { return snapshots[i]; }
};

double mid_price(const LobSnapshot& s);
double spread(const LobSnapshot& s);

// Canonicalizes ladder order in place, then enforces the snapshot
// invariants. Throws MalformedRecord / NegativeValue / CrossedBook.
void canonicalize_and_validate(LobSnapshot& s);

}  // namespace lobforge::lob
