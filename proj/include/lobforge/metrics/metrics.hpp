#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lobforge::metrics {

// Mean of |p - p_hat| / p over samples, in percent. Actuals must be > 0.
double mape_pct(const std::vector<double>& actuals,
                const std::vector<double>& forecasts);
inline double pct_to_bps(double pct) { return pct * 100.0; }

// sqrt(N) * mean(pnl) / std(pnl), population std. Throws ZeroVariance
// instead of returning +-inf.
double sharpe(const std::vector<double>& pnl);

double total_pnl(const std::vector<double>& pnl);

// min_i(cumsum(pnl)_i - runmax(cumsum(pnl))_i); 0 when cumulative PnL is
// non-decreasing, and 0 for a single element.
double max_drawdown(const std::vector<double>& pnl);

struct LogGrowthFit {
  double bias = 0.0;      // USD
  double velocity = 0.0;  // USD per ln(step)
  double velocity_bps() const { return velocity * 1e4; }
};
// Least squares of equity = bias + velocity * ln(step), step = 1..N.
LogGrowthFit fit_log_growth(const std::vector<double>& equity);

// v_t / v_{t-1} - 1; one shorter than the input.
std::vector<double> relative_changes(const std::vector<double>& volumes);

// Pearson correlation of equal-length series; symmetric, unit diagonal.
std::vector<double> pearson_matrix(const std::vector<std::vector<double>>& series);

struct VolumeCorrelation {
  std::vector<std::string> symbols;
  std::vector<double> matrix;  // row-major n x n
};
// Correlates per-bucket traded-volume relative changes across symbols.
// Bucket indices where any symbol has a zero previous volume are dropped
// for all symbols to keep the series aligned.
VolumeCorrelation volume_correlation(
    const std::vector<std::pair<std::string, std::vector<double>>>&
        bucketed_volumes);

// Sums trade quantities into a fixed [t0, t1) grid of bucket_ms cells.
std::vector<double> bucket_trade_volumes(const std::vector<double>& trade_qty,
                                         const std::vector<std::int64_t>& trade_ts,
                                         std::int64_t t0, std::int64_t t1,
                                         std::int64_t bucket_ms);

struct MetricReport {
  double mape_pct = 0.0;
  double mape_bps = 0.0;
  double sharpe = 0.0;  // 0 when undefined; see sharpe_defined
  bool sharpe_defined = false;
  double total_pnl = 0.0;
  double max_drawdown = 0.0;
  std::size_t n_samples = 0;
  std::map<std::string, double> per_symbol_mape_pct;
};

MetricReport forecast_report(const std::vector<double>& actuals,
                             const std::vector<double>& forecasts,
                             const std::vector<std::uint16_t>& symbol_idx = {},
                             const std::vector<std::string>& symbols = {});

nlohmann::json to_json(const MetricReport& r);

}  // namespace lobforge::metrics
