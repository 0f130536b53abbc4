#include "lobforge/backtest/engine.hpp"

#include <cmath>
#include <fstream>

#include "lobforge/errors.hpp"
#include "lobforge/lob/parse.hpp"
#include "lobforge/log.hpp"

namespace lobforge::backtest {

namespace {
constexpr double kMoneyTol = 1e-9;
}

void StrategyConfig::validate() const {
  if (!(quote_spread > 0.0)) throw ConfigError("quote_spread must be > 0");
  if (!(max_side_notional > 0.0)) throw ConfigError("max_side_notional must be > 0");
  if (!(initial_capital > 0.0)) throw ConfigError("initial_capital must be > 0");
}

std::vector<double> PnlSeries::pnl_vector() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.pnl);
  return out;
}

std::vector<double> PnlSeries::equity_curve() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.equity);
  return out;
}

Quotes quote(double pred_mid, const StrategyConfig& cfg, double inventory) {
  Quotes q;
  const double half = cfg.quote_spread / 2.0;
  const double sell_price = pred_mid + half;
  const double buy_price = pred_mid - half;

  if (sell_price > 0.0) {
    const double qty = cfg.max_side_notional / sell_price;
    const double inv_after = inventory - qty;
    if (std::abs(inv_after * sell_price) <= cfg.max_side_notional + kMoneyTol)
      q.sell = Order{sell_price, qty};
  }
  if (buy_price > 0.0) {
    const double qty = cfg.max_side_notional / buy_price;
    const double inv_after = inventory + qty;
    if (std::abs(inv_after * buy_price) <= cfg.max_side_notional + kMoneyTol)
      q.buy = Order{buy_price, qty};
  }
  return q;
}

std::vector<Fill> match_orders(const Quotes& quotes,
                               const lob::LobSnapshot& next_snapshot,
                               const std::vector<lob::TradeEvent>& trades,
                               std::size_t trade_begin, std::size_t trade_end,
                               const StrategyConfig& cfg) {
  std::vector<Fill> fills;
  const double best_bid = next_snapshot.best_bid();
  const double best_ask = next_snapshot.best_ask();

  auto maker_hit = [&](Side side, double price) {
    if (!cfg.use_trade_tape) return false;
    for (std::size_t i = trade_begin; i < trade_end; ++i) {
      if (side == Side::sell && trades[i].price >= price) return true;
      if (side == Side::buy && trades[i].price <= price) return true;
    }
    return false;
  };

  if (quotes.sell) {
    const Order& o = *quotes.sell;
    const bool crosses = cfg.paper_literal_fill_rule ? (o.price > best_bid)
                                                     : (o.price <= best_bid);
    if (crosses) {
      const double px = cfg.taker_at_touch ? best_bid : o.price;
      fills.push_back({Side::sell, px, o.qty, Role::taker,
                       px * o.qty * cfg.taker_fee_rate});
    } else if (maker_hit(Side::sell, o.price)) {
      fills.push_back({Side::sell, o.price, o.qty, Role::maker,
                       o.price * o.qty * cfg.maker_fee_rate});
    }
  }
  if (quotes.buy) {
    const Order& o = *quotes.buy;
    const bool crosses = cfg.paper_literal_fill_rule ? (o.price < best_ask)
                                                     : (o.price >= best_ask);
    if (crosses) {
      const double px = cfg.taker_at_touch ? best_ask : o.price;
      fills.push_back({Side::buy, px, o.qty, Role::taker,
                       px * o.qty * cfg.taker_fee_rate});
    } else if (maker_hit(Side::buy, o.price)) {
      fills.push_back({Side::buy, o.price, o.qty, Role::maker,
                       o.price * o.qty * cfg.maker_fee_rate});
    }
  }
  return fills;  // anything unfilled is cancelled at the step boundary
}

double step_pnl(BookkeepingState& state, const std::vector<Fill>& fills,
                double mid_next) {
  double cash_flow = 0.0;
  double fees = 0.0;
  double inv_after = state.inventory;
  for (const Fill& f : fills) {
    if (f.side == Side::buy) {
      cash_flow -= f.price * f.qty;
      inv_after += f.qty;
    } else {
      cash_flow += f.price * f.qty;
      inv_after -= f.qty;
    }
    fees += f.fee;
  }
  const double pnl =
      cash_flow + inv_after * mid_next - state.inventory * state.last_mid - fees;
  state.cash += cash_flow - fees;
  state.inventory = inv_after;
  state.last_mid = mid_next;
  return pnl;
}

PnlSeries run_backtest(const lob::SnapshotSeries& series,
                       const std::vector<lob::TradeEvent>& trades,
                       MidPredictor& predictor, const sampling::SampleSpec& spec,
                       const StrategyConfig& cfg) {
  cfg.validate();
  const auto l = static_cast<std::size_t>(spec.frame_count);
  if (series.size() < l + 1)
    throw SeriesTooShort("backtest needs at least L+1 snapshots");

  const auto frames = sampling::embed_series(series, spec.embed);

  PnlSeries out;
  out.initial_capital = cfg.initial_capital;
  BookkeepingState state;
  state.cash = cfg.initial_capital;
  state.last_mid = lob::mid_price(series[l - 1]);

  std::size_t trade_lo = 0;
  for (std::size_t i = l - 1; i + 1 < series.size(); ++i) {
    const std::int64_t t_now = series[i].ts_ms;
    const std::int64_t t_next = series[i + 1].ts_ms;

    sampling::Sample sample;
    sample.input = sampling::window_input(frames, spec, i);
    const std::size_t anchor_mid_idx =
        spec.anchor == sampling::Anchor::last ? i : i + 1 - l;
    const double anchor_mid = lob::mid_price(series[anchor_mid_idx]);
    sample.anchor_mids = {anchor_mid};
    sample.targets = {0.0};
    sample.true_future_mids = {anchor_mid};
    sample.t_anchor_ms = t_now;
    sample.t_target_ms = t_now;

    const double pred_mid = predictor.predict_mid(sample);
    const Quotes quotes = quote(pred_mid, cfg, state.inventory);

    while (trade_lo < trades.size() && trades[trade_lo].ts_ms <= t_now) ++trade_lo;
    std::size_t trade_hi = trade_lo;
    while (trade_hi < trades.size() && trades[trade_hi].ts_ms <= t_next) ++trade_hi;

    const double mid_next = lob::mid_price(series[i + 1]);
    std::vector<Fill> fills =
        match_orders(quotes, series[i + 1], trades, trade_lo, trade_hi, cfg);
    const double pnl = step_pnl(state, fills, mid_next);

    const double inv_notional = std::abs(state.inventory * mid_next);
    if (inv_notional > 2.0 * cfg.max_side_notional + kMoneyTol)
      throw OutOfRange("position cap violated: |inventory notional| = " +
                       std::to_string(inv_notional));

    StepRecord rec;
    rec.ts_ms = t_next;
    rec.pnl = pnl;
    rec.equity = state.equity(mid_next);
    rec.inventory = state.inventory;
    rec.mid = mid_next;
    rec.fills = std::move(fills);
    out.steps.push_back(std::move(rec));
  }
  return out;
}

void export_pnl_csv(const PnlSeries& series, const std::string& path,
                    const std::string& config_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.precision(17);
  if (!config_comment.empty()) f << "# " << config_comment << "\n";
  f << "ts_ms,pnl,cum_pnl,equity,inventory,fill_side,fill_price,fill_qty,"
       "fill_role,fee\n";
  double cum = 0.0;
  for (const auto& s : series.steps) {
    cum += s.pnl;
    std::string side, price, qty, role, fee;
    for (std::size_t i = 0; i < s.fills.size(); ++i) {
      const auto& fl = s.fills[i];
      const char* sep = i ? ";" : "";
      side += sep;
      side += fl.side == Side::buy ? "buy" : "sell";
      price += sep + std::to_string(fl.price);
      qty += sep + std::to_string(fl.qty);
      role += sep;
      role += fl.role == Role::maker ? "maker" : "taker";
      fee += sep + std::to_string(fl.fee);
    }
    f << s.ts_ms << ',' << s.pnl << ',' << cum << ',' << s.equity << ','
      << s.inventory << ',' << side << ',' << price << ',' << qty << ','
      << role << ',' << fee << '\n';
  }
  if (!f) throw IoError("write failure on " + path);
}

}  // namespace lobforge::backtest
