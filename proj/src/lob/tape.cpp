#include "lobforge/lob/tape.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>

#include "lobforge/errors.hpp"
#include "lobforge/lob/parse.hpp"
#include "lobforge/log.hpp"

namespace lobforge::lob {

namespace {

std::int64_t median_gap(const std::vector<LobSnapshot>& snaps) {
  if (snaps.size() < 2) return 0;
  std::vector<std::int64_t> gaps;
  gaps.reserve(snaps.size() - 1);
  for (std::size_t i = 1; i < snaps.size(); ++i)
    gaps.push_back(snaps[i].ts_ms - snaps[i - 1].ts_ms);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  // gzopen reads plain files as-is, so one code path covers both.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string content;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(n));
  const bool read_error = n < 0;
  gzclose(f);
  if (read_error) throw IoError("read failure on " + path);

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::size_t len = end - start;
    if (len > 0 && content[start + len - 1] == '\r') --len;
    if (len > 0) lines.emplace_back(content.substr(start, len));
    start = end + 1;
  }
  return lines;
}

SnapshotSeries load_tape(const std::string& path, const std::string& symbol,
                         TimeRange range) {
  SnapshotSeries series;
  series.symbol = symbol;
  for (const auto& line : read_lines(path)) {
    LobSnapshot s = parse_snapshot(line);
    if (!symbol.empty() && s.symbol != symbol) continue;
    if (!range.contains(s.ts_ms)) continue;
    series.snapshots.push_back(std::move(s));
  }
  if (series.snapshots.empty())
    throw EmptySeries("no snapshots for '" + symbol + "' in " + path);

  std::stable_sort(series.snapshots.begin(), series.snapshots.end(),
                   [](const LobSnapshot& a, const LobSnapshot& b) {
                     return a.ts_ms < b.ts_ms;
                   });
  // Duplicate timestamps: keep the last record seen (snapshots supersede).
  std::vector<LobSnapshot> dedup;
  dedup.reserve(series.snapshots.size());
  for (auto& s : series.snapshots) {
    if (!dedup.empty() && dedup.back().ts_ms == s.ts_ms)
      dedup.back() = std::move(s);
    else
      dedup.push_back(std::move(s));
  }
  series.snapshots = std::move(dedup);

  const std::size_t depth = series.snapshots.front().depth();
  for (const auto& s : series.snapshots)
    if (s.depth() != depth)
      throw MalformedRecord("varying depth in tape: expected " +
                            std::to_string(depth) + ", got " +
                            std::to_string(s.depth()) + " at ts " +
                            std::to_string(s.ts_ms));

  if (series.symbol.empty()) series.symbol = series.snapshots.front().symbol;
  series.nominal_interval_ms = median_gap(series.snapshots);
  log::debug("loaded ", series.snapshots.size(), " snapshots from ", path,
             " (nominal interval ", series.nominal_interval_ms, " ms)");
  return series;
}

std::vector<TradeEvent> load_trades(const std::string& path,
                                    const std::string& symbol, TimeRange range) {
  std::vector<TradeEvent> trades;
  for (const auto& line : read_lines(path)) {
    TradeEvent t = parse_trade(line);
    if (!symbol.empty() && t.symbol != symbol) continue;
    if (!range.contains(t.ts_ms)) continue;
    trades.push_back(std::move(t));
  }
  std::stable_sort(trades.begin(), trades.end(),
                   [](const TradeEvent& a, const TradeEvent& b) {
                     return a.ts_ms < b.ts_ms;
                   });
  return trades;
}

void save_tape(const SnapshotSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& s : series.snapshots) out << serialize_snapshot(s) << '\n';
  if (!out) throw IoError("write failure on " + path);
}

void save_trades(const std::vector<TradeEvent>& trades, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& t : trades) out << serialize_trade(t) << '\n';
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace lobforge::lob
