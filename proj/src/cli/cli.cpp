#include "lobforge/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lobforge/backtest/engine.hpp"
#include "lobforge/errors.hpp"
#include "lobforge/io/svg.hpp"
#include "lobforge/lob/tape.hpp"
#include "lobforge/log.hpp"
#include "lobforge/metrics/metrics.hpp"
#include "lobforge/models/checkpoint.hpp"
#include "lobforge/models/train.hpp"
#include "lobforge/sample/sample_io.hpp"
#include "lobforge/synth/generator.hpp"

namespace lobforge::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Shared option bag. Values resolve as defaults < --config file < flags.
struct Options {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string symbol;
  std::int64_t from_ms = std::numeric_limits<std::int64_t>::min();
  std::int64_t to_ms = std::numeric_limits<std::int64_t>::max();
  std::string aggregation = "30w";
  std::int64_t horizon_ms = 1000;
  std::string target = "delta";
  std::string repr = "stacked";
  int features = 4;
  std::string scaling = "domain";
  std::string arch = "CNN2LSTM";
  unsigned threads = 1;
  std::string out;

  std::int64_t epochs = 50;
  std::int64_t batch = 32;
  double lr = 1e-3;
  std::int64_t max_train = 5000;

  double spread = 0.1;
  double size = 5.0;
  double maker_fee = -0.0001;
  double taker_fee = 0.0005;
  bool no_trade_tape = false;
  bool paper_literal_fill = false;
  double initial_capital = 100.0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--symbol", o.symbol, "asset symbol filter");
  cmd->add_option("--from-ms", o.from_ms, "inclusive time filter");
  cmd->add_option("--to-ms", o.to_ms, "inclusive time filter");
  cmd->add_option("--threads", o.threads, "worker bound (never changes outputs)");
  cmd->add_option("--out", o.out, "output path")->required();
}

void add_sampling(CLI::App* cmd, Options& o) {
  cmd->add_option("--aggregation", o.aggregation, "Nw (window) or Ns (interval)");
  cmd->add_option("--horizon-ms", o.horizon_ms, "forecast horizon, ms");
  cmd->add_option("--target", o.target, "delta|returns");
  cmd->add_option("--repr", o.repr, "stacked|merged");
  cmd->add_option("--features", o.features, "4|8 feature columns");
  cmd->add_option("--scaling", o.scaling, "domain|global|zscore");
}

// Applies config-file values beneath any explicitly passed flags.
void merge_config(CLI::App* cmd, Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream f(o.config_path);
  if (!f) throw IoError("cannot open config " + o.config_path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  auto maybe = [&](const char* flag, const char* key, auto& slot) {
    using V = std::decay_t<decltype(slot)>;
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    const bool flag_given = opt && opt->count() > 0;
    if (!flag_given && j.contains(key)) slot = j.at(key).get<V>();
  };
  maybe("--seed", "seed", o.seed);
  maybe("--symbol", "symbol", o.symbol);
  maybe("--from-ms", "from_ms", o.from_ms);
  maybe("--to-ms", "to_ms", o.to_ms);
  maybe("--aggregation", "aggregation", o.aggregation);
  maybe("--horizon-ms", "horizon_ms", o.horizon_ms);
  maybe("--target", "target", o.target);
  maybe("--repr", "repr", o.repr);
  maybe("--features", "features", o.features);
  maybe("--scaling", "scaling", o.scaling);
  maybe("--arch", "arch", o.arch);
  maybe("--threads", "threads", o.threads);
  maybe("--epochs", "epochs", o.epochs);
  maybe("--batch", "batch", o.batch);
  maybe("--lr", "lr", o.lr);
  maybe("--max-train", "max_train", o.max_train);
  maybe("--spread", "spread", o.spread);
  maybe("--size", "size", o.size);
  maybe("--maker-fee", "maker_fee", o.maker_fee);
  maybe("--taker-fee", "taker_fee", o.taker_fee);
  maybe("--initial-capital", "initial_capital", o.initial_capital);
}

json resolved_config(const Options& o, const std::string& command) {
  json j;
  j["command"] = command;
  j["seed"] = o.seed;
  j["symbol"] = o.symbol;
  j["aggregation"] = o.aggregation;
  j["horizon_ms"] = o.horizon_ms;
  j["target"] = o.target;
  j["repr"] = o.repr;
  j["features"] = o.features;
  j["scaling"] = o.scaling;
  j["arch"] = o.arch;
  j["threads"] = o.threads;
  j["epochs"] = o.epochs;
  j["batch"] = o.batch;
  j["lr"] = o.lr;
  j["max_train"] = o.max_train;
  j["spread"] = o.spread;
  j["size"] = o.size;
  j["maker_fee"] = o.maker_fee;
  j["taker_fee"] = o.taker_fee;
  j["initial_capital"] = o.initial_capital;
  return j;
}

lob::TimeRange range_of(const Options& o) { return {o.from_ms, o.to_ms}; }

embed::EmbedConfig make_embed_config(const Options& o,
                                     const lob::SnapshotSeries& series) {
  embed::EmbedConfig cfg;
  cfg.volume_scaling = embed::volume_scaling_from_string(o.scaling);
  if (o.features != 4 && o.features != 8)
    throw ConfigError("--features must be 4 or 8");
  cfg.feature_set = static_cast<embed::FeatureSet>(o.features);
  if (cfg.volume_scaling != embed::VolumeScaling::minmax_domain ||
      cfg.feature_set == embed::FeatureSet::f8)
    cfg.global_stats = embed::compute_global_stats(series);
  return cfg;
}

sampling::SampleSpec make_spec(const Options& o,
                               const lob::SnapshotSeries& series) {
  sampling::SampleSpec spec;
  spec = sampling::SampleSpec::with_aggregation(spec, o.aggregation);
  spec.horizon_ms = o.horizon_ms;
  spec.target_kind = sampling::target_kind_from_string(o.target);
  spec.representation = sampling::representation_from_string(o.repr);
  spec.embed = make_embed_config(o, series);
  spec.max_train_samples = o.max_train;
  return spec;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failure on " + path);
}

// --- subcommand bodies -----------------------------------------------------

int cmd_synth(const Options& o, const std::string& kind, std::size_t snapshots,
              std::size_t depth, std::int64_t interval_ms, double base_price,
              double tick, double drift, double noise, double trade_rate) {
  synth::TapeConfig cfg;
  cfg.kind = synth::tape_kind_from_string(kind);
  if (!o.symbol.empty()) cfg.symbol = o.symbol;
  cfg.snapshots = snapshots;
  cfg.depth = depth;
  cfg.interval_ms = interval_ms;
  cfg.base_price = base_price;
  cfg.tick = tick;
  cfg.drift_per_step = drift;
  cfg.noise = noise;
  cfg.trade_rate = trade_rate;
  cfg.seed = o.seed;

  const auto tape = synth::generate_tape(cfg);
  fs::create_directories(o.out);
  lob::save_tape(tape.series, (fs::path(o.out) / "tape.jsonl").string());
  lob::save_trades(tape.trades, (fs::path(o.out) / "trades.jsonl").string());
  std::cout << "wrote " << tape.series.size() << " snapshots, "
            << tape.trades.size() << " trades to " << o.out << "\n";
  return kExitOk;
}

int cmd_ingest(const Options& o, const std::string& in,
               const std::string& trades_in, const std::string& trades_out) {
  const auto series = lob::load_tape(in, o.symbol, range_of(o));
  lob::save_tape(series, o.out);
  std::cout << "ingested " << series.size() << " snapshots (D="
            << series.snapshots.front().depth() << ") -> " << o.out << "\n";
  if (!trades_in.empty()) {
    if (trades_out.empty())
      throw ConfigError("--trades-in needs --trades-out");
    const auto trades = lob::load_trades(trades_in, o.symbol, range_of(o));
    lob::save_trades(trades, trades_out);
    std::cout << "ingested " << trades.size() << " trades -> " << trades_out << "\n";
  }
  return kExitOk;
}

int cmd_embed(const Options& o, const std::string& tape, std::size_t limit,
              std::int64_t merge_l) {
  const auto series = lob::load_tape(tape, o.symbol, range_of(o));
  const auto cfg = make_embed_config(o, series);
  const auto frames = sampling::embed_series(series, cfg, o.threads);
  fs::create_directories(o.out);
  const std::string meta = resolved_config(o, "embed").dump();
  const bool clamp = cfg.volume_scaling == embed::VolumeScaling::zscore;

  std::size_t written = 0;
  if (merge_l > 1) {
    for (std::size_t i = static_cast<std::size_t>(merge_l) - 1;
         i < frames.size() && written < limit; i += static_cast<std::size_t>(merge_l)) {
      std::vector<embed::FrameMatrix> window(frames.begin() + (i + 1 - merge_l),
                                             frames.begin() + (i + 1));
      const nn::Tensor img = embed::merge_frames(window);
      std::vector<double> px(img.data.begin(), img.data.end());
      embed::export_frame_png(
          static_cast<std::size_t>(img.shape[0]),
          static_cast<std::size_t>(img.shape[1]), px.data(),
          (fs::path(o.out) / ("window_" + std::to_string(frames[i].ts_ms) + ".png")).string(),
          clamp, meta);
      ++written;
    }
  } else {
    for (std::size_t i = 0; i < frames.size() && written < limit; ++i) {
      embed::export_frame_png(
          frames[i],
          (fs::path(o.out) / ("frame_" + std::to_string(frames[i].ts_ms) + ".png")).string(),
          clamp, meta);
      ++written;
    }
  }
  std::cout << "wrote " << written << " PNG frame(s) to " << o.out << "\n";
  return kExitOk;
}

int cmd_sample(const Options& o, const std::string& tape,
               const std::string& split, const std::string& stats_from,
               const std::vector<std::string>& mix_with,
               const std::string& oneshot_with, std::int64_t align_tol_ms) {
  const auto series = lob::load_tape(tape, o.symbol, range_of(o));
  sampling::SampleSpec spec = make_spec(o, series);
  if (!stats_from.empty()) {
    const auto donor = sampling::load_sample_set(stats_from);
    spec.embed.global_stats = donor.spec.embed.global_stats;
  }
  sampling::SampleSet set = sampling::build_samples(series, spec, split);
  if (!oneshot_with.empty()) {
    // this tape is the first asset, the loaded set the second
    set = sampling::pair_oneshot(set, sampling::load_sample_set(oneshot_with),
                                 align_tol_ms);
  } else if (!mix_with.empty()) {
    std::vector<sampling::SampleSet> sets{std::move(set)};
    for (const auto& path : mix_with)
      sets.push_back(sampling::load_sample_set(path));
    set = sampling::union_sets(sets);
  }
  if (split == "train") set.scaler = sampling::fit_target_scaler(set);
  sampling::save_sample_set(set, o.out, resolved_config(o, "sample"));
  std::cout << "wrote " << set.size() << " " << split << " samples (target dim "
            << set.target_dim() << ") -> " << o.out << "\n";
  return kExitOk;
}

int cmd_train(const Options& o, const std::string& samples_path) {
  auto set = sampling::load_sample_set(samples_path);
  if (set.split != "train")
    log::warn("training on a set tagged '", set.split, "'");
  if (!set.scaler.fitted()) set.scaler = sampling::fit_target_scaler(set);

  models::ArchSpec arch;
  arch.kind = models::arch_kind_from_string(o.arch);
  arch.frames = set.spec.frame_count;
  const auto& shape = set.samples.front().input.shape;
  if (set.spec.representation == sampling::Representation::stacked) {
    arch.input_channels = shape[0];  // 2L for one-shot sets
    arch.depth = shape[1];
    arch.features = shape[2];
  } else {
    arch.depth = shape[0];
    arch.features = shape[1] / set.spec.frame_count;
  }
  arch.output_dim = static_cast<std::int64_t>(set.target_dim());
  if (arch.representation() != set.spec.representation &&
      arch.kind != models::ArchKind::persistence)
    throw ShapeMismatch("architecture " + o.arch + " needs " +
                        sampling::to_string(arch.representation()) +
                        " samples, set is " +
                        sampling::to_string(set.spec.representation));

  auto model = models::build_model<float>(arch, o.seed);
  models::TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch = o.batch;
  tc.lr = o.lr;
  tc.seed = o.seed;
  const auto history = models::train_model(*model, set, tc);

  models::CheckpointMeta meta;
  meta.arch = arch;
  meta.scaler = set.scaler;
  meta.target_kind = set.spec.target_kind;
  meta.embed_meta = sampling::spec_to_json(set.spec);
  meta.history = history;
  meta.seed = o.seed;
  meta.config = resolved_config(o, "train");
  models::save_checkpoint(*model, meta, o.out);
  std::cout << "trained " << o.arch << " for " << o.epochs << " epochs; final loss "
            << (history.epoch_loss.empty() ? 0.0 : history.epoch_loss.back())
            << " -> " << o.out << "\n";
  return kExitOk;
}

int cmd_predict(const Options& o, const std::string& checkpoint,
                const std::string& samples_path, const std::string& report_path) {
  auto ck = models::load_checkpoint(checkpoint);
  auto set = sampling::load_sample_set(samples_path);
  const auto eval = models::evaluate(*ck.model, ck.meta.scaler, set);

  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot write " + o.out);
  f.precision(17);
  f << "# " << resolved_config(o, "predict").dump() << "\n";
  f << "t_anchor_ms,t_target_ms,symbol,anchor_mid,actual_mid,forecast_mid\n";
  const std::size_t k = set.target_dim();
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& s = set.samples[i];
    for (std::size_t d = 0; d < k; ++d) {
      const std::size_t row = i * k + d;
      const std::string sym =
          k == 1 ? set.symbols[s.symbol_idx]
                 : (d < set.symbols.size() ? set.symbols[d] : "?");
      f << s.t_anchor_ms << ',' << s.t_target_ms << ',' << sym << ','
        << s.anchor_mids[d] << ',' << eval.actual_mids[row] << ','
        << eval.forecast_mids[row] << '\n';
    }
  }
  if (!f) throw IoError("write failure on " + o.out);

  auto report = metrics::forecast_report(eval.actual_mids, eval.forecast_mids,
                                         eval.symbol_idx, set.symbols);
  json rj = metrics::to_json(report);
  rj["config"] = resolved_config(o, "predict");
  if (!report_path.empty()) write_json(rj, report_path);
  std::cout << "MAPE " << report.mape_pct << " % (" << report.mape_bps
            << " bps) over " << report.n_samples << " forecasts -> " << o.out
            << "\n";
  return kExitOk;
}

class CheckpointPredictor final : public backtest::MidPredictor {
 public:
  CheckpointPredictor(models::Model& model, sampling::TargetScaler scaler,
                      sampling::TargetKind kind)
      : model_(model), scaler_(std::move(scaler)), kind_(kind) {}
  double predict_mid(const sampling::Sample& sample) override {
    return models::predict_mids(model_, scaler_, sample, kind_).front();
  }

 private:
  models::Model& model_;
  sampling::TargetScaler scaler_;
  sampling::TargetKind kind_;
};

int cmd_backtest(const Options& o, const std::string& checkpoint,
                 const std::string& tape, const std::string& trades_path,
                 const std::string& summary_path) {
  const auto series = lob::load_tape(tape, o.symbol, range_of(o));
  std::vector<lob::TradeEvent> trades;
  if (!trades_path.empty())
    trades = lob::load_trades(trades_path, o.symbol, range_of(o));

  backtest::StrategyConfig cfg;
  cfg.quote_spread = o.spread;
  cfg.max_side_notional = o.size;
  cfg.maker_fee_rate = o.maker_fee;
  cfg.taker_fee_rate = o.taker_fee;
  cfg.use_trade_tape = !o.no_trade_tape && !trades.empty();
  cfg.paper_literal_fill_rule = o.paper_literal_fill;
  cfg.initial_capital = o.initial_capital;

  std::unique_ptr<models::Model> model;
  sampling::SampleSpec spec;
  sampling::TargetScaler scaler;
  sampling::TargetKind kind;
  if (!checkpoint.empty()) {
    auto ck = models::load_checkpoint(checkpoint);
    model = std::move(ck.model);
    spec = sampling::spec_from_json(ck.meta.embed_meta);
    scaler = ck.meta.scaler;
    kind = ck.meta.target_kind;
  } else {
    // No checkpoint: persistence baseline over the flag-driven spec.
    spec = make_spec(o, series);
    models::ArchSpec arch;
    arch.kind = models::ArchKind::persistence;
    arch.frames = spec.frame_count;
    arch.depth = static_cast<std::int64_t>(series.snapshots.front().depth());
    arch.features = o.features;
    model = models::build_model<float>(arch, o.seed);
    kind = spec.target_kind;
  }
  if (spec.embed.volume_scaling != embed::VolumeScaling::minmax_domain &&
      !spec.embed.global_stats)
    spec.embed.global_stats = embed::compute_global_stats(series);

  CheckpointPredictor predictor(*model, scaler, kind);
  const auto pnl = backtest::run_backtest(series, trades, predictor, spec, cfg);

  const json cfg_echo = resolved_config(o, "backtest");
  backtest::export_pnl_csv(pnl, o.out, cfg_echo.dump());

  const auto pnl_vec = pnl.pnl_vector();
  json summary;
  summary["config"] = cfg_echo;
  summary["steps"] = pnl.steps.size();
  summary["initial_capital"] = pnl.initial_capital;
  summary["total_pnl"] = metrics::total_pnl(pnl_vec);
  summary["max_drawdown"] = metrics::max_drawdown(pnl_vec);
  try {
    summary["sharpe"] = metrics::sharpe(pnl_vec);
  } catch (const Error&) {
    summary["sharpe"] = nullptr;  // zero variance
  }
  std::size_t n_fills = 0;
  for (const auto& s : pnl.steps) n_fills += s.fills.size();
  summary["fills"] = n_fills;
  try {
    const auto fit = metrics::fit_log_growth(pnl.equity_curve());
    summary["log_growth"] = {{"bias", fit.bias},
                             {"velocity_bps", fit.velocity_bps()}};
  } catch (const Error&) {
    summary["log_growth"] = nullptr;
  }
  if (!summary_path.empty()) write_json(summary, summary_path);
  std::cout << "backtest: " << pnl.steps.size() << " steps, total pnl "
            << summary["total_pnl"].get<double>() << " USD, " << n_fills
            << " fills -> " << o.out << "\n";
  return kExitOk;
}

int cmd_analyze(const Options& o, const std::vector<std::string>& trade_tapes,
                std::int64_t bucket_ms) {
  if (trade_tapes.size() < 2)
    throw ConfigError("analyze needs at least two trade tapes");
  std::vector<std::pair<std::string, std::vector<lob::TradeEvent>>> per_symbol;
  std::int64_t t0 = std::numeric_limits<std::int64_t>::max();
  std::int64_t t1 = std::numeric_limits<std::int64_t>::min();
  for (const auto& path : trade_tapes) {
    auto trades = lob::load_trades(path, "", range_of(o));
    if (trades.empty()) throw EmptySeries("no trades in " + path);
    t0 = std::min(t0, trades.front().ts_ms);
    t1 = std::max(t1, trades.back().ts_ms + 1);
    per_symbol.emplace_back(trades.front().symbol, std::move(trades));
  }

  std::vector<std::pair<std::string, std::vector<double>>> volumes;
  for (const auto& [sym, trades] : per_symbol) {
    std::vector<double> qty;
    std::vector<std::int64_t> ts;
    qty.reserve(trades.size());
    ts.reserve(trades.size());
    for (const auto& t : trades) {
      qty.push_back(t.qty);
      ts.push_back(t.ts_ms);
    }
    volumes.emplace_back(sym,
                         metrics::bucket_trade_volumes(qty, ts, t0, t1, bucket_ms));
  }
  const auto corr = metrics::volume_correlation(volumes);

  fs::create_directories(fs::path(o.out));
  const std::string csv_path = (fs::path(o.out) / "volume_corr.csv").string();
  std::ofstream f(csv_path, std::ios::binary);
  if (!f) throw IoError("cannot write " + csv_path);
  f.precision(17);
  f << "# " << resolved_config(o, "analyze").dump() << "\n";
  f << "symbol";
  for (const auto& s : corr.symbols) f << ',' << s;
  f << '\n';
  const std::size_t n = corr.symbols.size();
  for (std::size_t i = 0; i < n; ++i) {
    f << corr.symbols[i];
    for (std::size_t j = 0; j < n; ++j) f << ',' << corr.matrix[i * n + j];
    f << '\n';
  }
  io::write_heatmap_svg((fs::path(o.out) / "volume_corr.svg").string(),
                        "Volume relative-change correlation", corr.symbols,
                        corr.matrix, resolved_config(o, "analyze").dump());
  std::cout << "wrote correlation matrix for " << n << " symbols to " << o.out
            << "\n";
  return kExitOk;
}

struct PnlCsv {
  std::vector<double> pnl;
  std::vector<double> equity;
};

PnlCsv read_pnl_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  PnlCsv out;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      cells.push_back(line.substr(start, end - start));
      start = end + 1;
    }
    if (cells.size() < 4) throw MalformedRecord("short row in " + path);
    out.pnl.push_back(std::stod(cells[1]));
    out.equity.push_back(std::stod(cells[3]));
  }
  if (out.pnl.empty()) throw EmptySeries("no rows in " + path);
  return out;
}

int cmd_report(const Options& o, const std::vector<std::string>& pnl_csvs) {
  if (pnl_csvs.empty()) throw ConfigError("report needs at least one PnL CSV");
  fs::create_directories(fs::path(o.out));

  static const char* kColors[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd"};
  std::vector<io::SvgSeries> series;
  json summary = json::array();
  for (std::size_t i = 0; i < pnl_csvs.size(); ++i) {
    const auto data = read_pnl_csv(pnl_csvs[i]);
    const std::string label = fs::path(pnl_csvs[i]).stem().string();

    io::SvgSeries s;
    s.label = label;
    s.color = kColors[i % 4];
    for (std::size_t t = 0; t < data.equity.size(); ++t) {
      s.x.push_back(static_cast<double>(t + 1));
      s.y.push_back(data.equity[t]);
    }
    series.push_back(s);

    json entry;
    entry["label"] = label;
    entry["total_pnl"] = metrics::total_pnl(data.pnl);
    entry["max_drawdown"] = metrics::max_drawdown(data.pnl);
    try {
      entry["sharpe"] = metrics::sharpe(data.pnl);
    } catch (const Error&) {
      entry["sharpe"] = nullptr;
    }
    try {
      const auto fit = metrics::fit_log_growth(data.equity);
      entry["log_growth"] = {{"bias", fit.bias},
                             {"velocity_bps", fit.velocity_bps()}};
      io::SvgSeries fitted;
      fitted.label = label + " fit";
      fitted.color = s.color;
      fitted.dashed = true;
      for (std::size_t t = 0; t < data.equity.size(); ++t) {
        fitted.x.push_back(static_cast<double>(t + 1));
        fitted.y.push_back(fit.bias +
                           fit.velocity * std::log(static_cast<double>(t + 1)));
      }
      series.push_back(std::move(fitted));
    } catch (const Error&) {
      entry["log_growth"] = nullptr;
    }
    summary.push_back(entry);
  }

  io::write_line_chart_svg((fs::path(o.out) / "pnl_curves.svg").string(),
                           "Cumulative PnL", series, "step", "equity, USD",
                           resolved_config(o, "report").dump());
  json root;
  root["config"] = resolved_config(o, "report");
  root["curves"] = summary;
  write_json(root, (fs::path(o.out) / "summary.json").string());
  std::cout << "report for " << pnl_csvs.size() << " curve(s) -> " << o.out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"lobforge: order-book tensor pipeline, forecasters and "
               "market-making replay"};
  app.require_subcommand(1);

  Options o;

  // synth
  std::string synth_kind = "drift";
  std::size_t synth_n = 1000, synth_depth = 10;
  std::int64_t synth_interval = 200;
  double synth_base = 100.0, synth_tick = 0.01, synth_drift = 0.02,
         synth_noise = 0.0, synth_trade_rate = 1.0;
  auto* synth = app.add_subcommand("synth", "generate a deterministic test tape");
  add_common(synth, o);
  synth->add_option("--kind", synth_kind, "flat|drift|meanrev");
  synth->add_option("--snapshots", synth_n);
  synth->add_option("--depth", synth_depth);
  synth->add_option("--interval-ms", synth_interval);
  synth->add_option("--base-price", synth_base);
  synth->add_option("--tick", synth_tick);
  synth->add_option("--drift", synth_drift);
  synth->add_option("--noise", synth_noise);
  synth->add_option("--trade-rate", synth_trade_rate);

  // ingest
  std::string in_path, trades_in, trades_out;
  auto* ingest = app.add_subcommand("ingest", "validate and canonicalize a raw tape");
  add_common(ingest, o);
  ingest->add_option("--in", in_path, "raw snapshot JSONL(.gz)")->required();
  ingest->add_option("--trades-in", trades_in, "raw trade JSONL(.gz)");
  ingest->add_option("--trades-out", trades_out, "canonical trade output");

  // embed
  std::string embed_tape;
  std::size_t embed_limit = 16;
  std::int64_t embed_merge = 0;
  auto* embed_cmd = app.add_subcommand("embed", "export frame images");
  add_common(embed_cmd, o);
  add_sampling(embed_cmd, o);
  embed_cmd->add_option("--tape", embed_tape)->required();
  embed_cmd->add_option("--limit", embed_limit, "max images to write");
  embed_cmd->add_option("--merge-frames", embed_merge,
                        "merge windows of L frames instead of single frames");

  // sample
  std::string sample_tape, sample_split = "train", stats_from, oneshot_with;
  std::vector<std::string> mix_with;
  std::int64_t align_tol_ms = 100;
  auto* sample = app.add_subcommand("sample", "build a supervised sample set");
  add_common(sample, o);
  add_sampling(sample, o);
  sample->add_option("--tape", sample_tape)->required();
  sample->add_option("--split", sample_split, "train|test tag");
  sample->add_option("--stats-from", stats_from,
                     "reuse global stats from an existing sample set");
  sample->add_option("--max-train", o.max_train,
                     "earliest-N cap on train sets (0 = off)");
  sample->add_option("--mix-with", mix_with,
                     "existing sample set(s) to union into a mixed set");
  sample->add_option("--oneshot-with", oneshot_with,
                     "pair with an existing set: channel concat, 2-vector targets");
  sample->add_option("--align-tol-ms", align_tol_ms,
                     "one-shot timestamp join tolerance");

  // train
  std::string train_samples;
  auto* train = app.add_subcommand("train", "train a forecaster");
  add_common(train, o);
  train->add_option("--samples", train_samples)->required();
  train->add_option("--arch", o.arch,
                    "SimpleCNN|SimpleCNN_2D|CNN2LSTM|CNNModel_2D|Persistence");
  train->add_option("--epochs", o.epochs);
  train->add_option("--batch", o.batch);
  train->add_option("--lr", o.lr);

  // predict
  std::string predict_ckpt, predict_samples, predict_report;
  auto* predict = app.add_subcommand("predict", "forecast a sample set");
  add_common(predict, o);
  predict->add_option("--checkpoint", predict_ckpt)->required();
  predict->add_option("--samples", predict_samples)->required();
  predict->add_option("--report", predict_report, "metrics JSON path");

  // backtest
  std::string bt_ckpt, bt_tape, bt_trades, bt_summary;
  auto* bt = app.add_subcommand("backtest", "replay the quoting strategy");
  add_common(bt, o);
  add_sampling(bt, o);
  bt->add_option("--checkpoint", bt_ckpt, "omit for the persistence baseline");
  bt->add_option("--tape", bt_tape)->required();
  bt->add_option("--trades", bt_trades, "trade prints tape");
  bt->add_option("--spread", o.spread, "quote spread, USD");
  bt->add_option("--size", o.size, "per-side notional cap, USD");
  bt->add_option("--maker-fee", o.maker_fee);
  bt->add_option("--taker-fee", o.taker_fee);
  bt->add_option("--initial-capital", o.initial_capital);
  bt->add_flag("--no-trade-tape", o.no_trade_tape, "crossing fills only");
  bt->add_flag("--paper-literal-fill", o.paper_literal_fill,
               "use the literally stated crossing comparison");
  bt->add_option("--summary", bt_summary, "metrics JSON path");

  // analyze
  std::vector<std::string> analyze_tapes;
  std::int64_t analyze_bucket = 3600000;
  auto* analyze = app.add_subcommand("analyze", "cross-asset volume correlation");
  add_common(analyze, o);
  analyze->add_option("tapes", analyze_tapes, "trade tapes, one per symbol")
      ->required();
  analyze->add_option("--bucket-ms", analyze_bucket);

  // report
  std::vector<std::string> report_csvs;
  auto* report = app.add_subcommand("report", "render PnL curves and summaries");
  add_common(report, o);
  report->add_option("--pnl", report_csvs, "PnL CSV file(s)")->required();

  std::vector<std::string> argv_copy(args.begin(), args.end());
  try {
    std::vector<const char*> argv;
    argv.push_back("lobforge");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    merge_config(active, o);
    if (active == synth)
      return cmd_synth(o, synth_kind, synth_n, synth_depth, synth_interval,
                       synth_base, synth_tick, synth_drift, synth_noise,
                       synth_trade_rate);
    if (active == ingest) return cmd_ingest(o, in_path, trades_in, trades_out);
    if (active == embed_cmd) return cmd_embed(o, embed_tape, embed_limit, embed_merge);
    if (active == sample)
      return cmd_sample(o, sample_tape, sample_split, stats_from, mix_with,
                        oneshot_with, align_tol_ms);
    if (active == train) return cmd_train(o, train_samples);
    if (active == predict) return cmd_predict(o, predict_ckpt, predict_samples, predict_report);
    if (active == bt) return cmd_backtest(o, bt_ckpt, bt_tape, bt_trades, bt_summary);
    if (active == analyze) return cmd_analyze(o, analyze_tapes, analyze_bucket);
    if (active == report) return cmd_report(o, report_csvs);
    throw ConfigError("no subcommand dispatched");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitData;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace lobforge::cli
