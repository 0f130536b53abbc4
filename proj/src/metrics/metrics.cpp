#include "lobforge/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "lobforge/errors.hpp"

namespace lobforge::metrics {

double mape_pct(const std::vector<double>& actuals,
                const std::vector<double>& forecasts) {
  if (actuals.size() != forecasts.size())
    throw LengthMismatch("mape input lengths differ");
  if (actuals.empty()) throw LengthMismatch("mape over empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < actuals.size(); ++i) {
    if (!(actuals[i] > 0.0))
      throw NonPositiveActual("actual value " + std::to_string(actuals[i]));
    acc += std::abs(actuals[i] - forecasts[i]) / actuals[i];
  }
  return acc / static_cast<double>(actuals.size()) * 100.0;
}

double sharpe(const std::vector<double>& pnl) {
  if (pnl.size() < 2) throw LengthMismatch("sharpe needs at least 2 steps");
  const double n = static_cast<double>(pnl.size());
  double mean = 0.0;
  for (double v : pnl) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : pnl) ss += (v - mean) * (v - mean);
  const double stdev = std::sqrt(ss / n);
  if (!(stdev > 0.0)) throw ZeroVariance("constant pnl vector");
  return std::sqrt(n) * mean / stdev;
}

double total_pnl(const std::vector<double>& pnl) {
  double acc = 0.0;
  for (double v : pnl) acc += v;
  return acc;
}

double max_drawdown(const std::vector<double>& pnl) {
  double cum = 0.0, peak = 0.0, dd = 0.0;
  bool first = true;
  for (double v : pnl) {
    cum += v;
    if (first) {
      peak = cum;
      first = false;
    }
    peak = std::max(peak, cum);
    dd = std::min(dd, cum - peak);
  }
  return dd;
}

LogGrowthFit fit_log_growth(const std::vector<double>& equity) {
  const std::size_t n = equity.size();
  if (n < 2) throw DegenerateFit("need at least 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(i + 1));
    sx += x;
    sy += equity[i];
    sxx += x * x;
    sxy += x * equity[i];
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw DegenerateFit("x variance is zero");
  LogGrowthFit fit;
  fit.velocity = (static_cast<double>(n) * sxy - sx * sy) / denom;
  fit.bias = (sy - fit.velocity * sx) / static_cast<double>(n);
  return fit;
}

std::vector<double> relative_changes(const std::vector<double>& volumes) {
  std::vector<double> out;
  if (volumes.size() < 2) return out;
  out.reserve(volumes.size() - 1);
  for (std::size_t i = 1; i < volumes.size(); ++i)
    out.push_back(volumes[i] / volumes[i - 1] - 1.0);
  return out;
}

std::vector<double> pearson_matrix(const std::vector<std::vector<double>>& series) {
  const std::size_t n = series.size();
  if (n < 2) throw InsufficientOverlap("need at least 2 series");
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len) throw LengthMismatch("series lengths differ");
  if (len < 2) throw InsufficientOverlap("need at least 2 aligned points");

  std::vector<double> mean(n, 0.0), stdev(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : series[i]) mean[i] += v;
    mean[i] /= static_cast<double>(len);
    for (double v : series[i]) stdev[i] += (v - mean[i]) * (v - mean[i]);
    stdev[i] = std::sqrt(stdev[i] / static_cast<double>(len));
    if (!(stdev[i] > 0.0))
      throw ZeroVariance("series " + std::to_string(i) + " is constant");
  }

  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double cov = 0.0;
      for (std::size_t t = 0; t < len; ++t)
        cov += (series[i][t] - mean[i]) * (series[j][t] - mean[j]);
      cov /= static_cast<double>(len);
      const double r = std::clamp(cov / (stdev[i] * stdev[j]), -1.0, 1.0);
      m[i * n + j] = r;
      m[j * n + i] = r;
    }
  }
  return m;
}

VolumeCorrelation volume_correlation(
    const std::vector<std::pair<std::string, std::vector<double>>>&
        bucketed_volumes) {
  const std::size_t n = bucketed_volumes.size();
  if (n < 2) throw InsufficientOverlap("need at least 2 symbols");
  const std::size_t buckets = bucketed_volumes.front().second.size();
  for (const auto& [sym, vols] : bucketed_volumes)
    if (vols.size() != buckets)
      throw LengthMismatch("bucket counts differ for " + sym);
  if (buckets < 3) throw InsufficientOverlap("need at least 3 buckets");

  // Drop change indices where any symbol had a zero previous volume.
  std::vector<std::vector<double>> changes(n);
  for (std::size_t t = 1; t < buckets; ++t) {
    bool ok = true;
    for (const auto& [sym, vols] : bucketed_volumes)
      if (!(vols[t - 1] > 0.0)) ok = false;
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& vols = bucketed_volumes[i].second;
      changes[i].push_back(vols[t] / vols[t - 1] - 1.0);
    }
  }
  if (changes.front().size() < 2)
    throw InsufficientOverlap("too few usable buckets after zero filtering");

  VolumeCorrelation out;
  for (const auto& [sym, vols] : bucketed_volumes) out.symbols.push_back(sym);
  out.matrix = pearson_matrix(changes);
  return out;
}

std::vector<double> bucket_trade_volumes(const std::vector<double>& trade_qty,
                                         const std::vector<std::int64_t>& trade_ts,
                                         std::int64_t t0, std::int64_t t1,
                                         std::int64_t bucket_ms) {
  if (trade_qty.size() != trade_ts.size())
    throw LengthMismatch("qty/ts lengths differ");
  if (bucket_ms <= 0 || t1 <= t0) throw ConfigError("bad bucket grid");
  const std::size_t buckets =
      static_cast<std::size_t>((t1 - t0 + bucket_ms - 1) / bucket_ms);
  std::vector<double> out(buckets, 0.0);
  for (std::size_t i = 0; i < trade_ts.size(); ++i) {
    if (trade_ts[i] < t0 || trade_ts[i] >= t1) continue;
    out[static_cast<std::size_t>((trade_ts[i] - t0) / bucket_ms)] += trade_qty[i];
  }
  return out;
}

MetricReport forecast_report(const std::vector<double>& actuals,
                             const std::vector<double>& forecasts,
                             const std::vector<std::uint16_t>& symbol_idx,
                             const std::vector<std::string>& symbols) {
  MetricReport r;
  r.mape_pct = mape_pct(actuals, forecasts);
  r.mape_bps = pct_to_bps(r.mape_pct);
  r.n_samples = actuals.size();
  if (!symbol_idx.empty() && symbols.size() > 1) {
    for (std::size_t s = 0; s < symbols.size(); ++s) {
      std::vector<double> a, f;
      for (std::size_t i = 0; i < actuals.size(); ++i)
        if (symbol_idx[i] == s) {
          a.push_back(actuals[i]);
          f.push_back(forecasts[i]);
        }
      if (!a.empty()) r.per_symbol_mape_pct[symbols[s]] = mape_pct(a, f);
    }
  }
  return r;
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j;
  j["mape_pct"] = r.mape_pct;
  j["mape_bps"] = r.mape_bps;
  if (r.sharpe_defined) j["sharpe"] = r.sharpe;
  j["total_pnl"] = r.total_pnl;
  j["max_drawdown"] = r.max_drawdown;
  j["n_samples"] = r.n_samples;
  if (!r.per_symbol_mape_pct.empty()) j["per_symbol_mape_pct"] = r.per_symbol_mape_pct;
  return j;
}

}  // namespace lobforge::metrics
