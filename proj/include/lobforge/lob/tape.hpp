#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lobforge/lob/types.hpp"

namespace lobforge::lob {

struct TimeRange {
  std::int64_t from_ms = std::numeric_limits<std::int64_t>::min();
  std::int64_t to_ms = std::numeric_limits<std::int64_t>::max();
  bool contains(std::int64_t ts) const { return ts >= from_ms && ts <= to_ms; }
};

// JSON Lines, gzip-transparent. Output is time-filtered, sorted ascending,
// duplicate timestamps deduplicated keeping the last record, depth uniform.
SnapshotSeries load_tape(const std::string& path, const std::string& symbol,
                         TimeRange range = {});
std::vector<TradeEvent> load_trades(const std::string& path,
                                    const std::string& symbol,
                                    TimeRange range = {});

void save_tape(const SnapshotSeries& series, const std::string& path);
void save_trades(const std::vector<TradeEvent>& trades, const std::string& path);

// Reads a whole file (plain or gzip) and splits it into non-empty lines.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace lobforge::lob
