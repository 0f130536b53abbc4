#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lobforge/lob/types.hpp"
#include "lobforge/sample/sampling.hpp"

namespace lobforge::backtest {

struct StrategyConfig {
  double quote_spread = 0.1;        // USD between own sell and buy quotes
  double max_side_notional = 5.0;   // USD cap per side and on inventory
  double maker_fee_rate = -0.0001;  // negative = rebate
  double taker_fee_rate = 0.0005;
  bool use_trade_tape = true;       // false: only crossing fills occur
  bool taker_at_touch = false;      // fill crossing orders at the touch price
  bool paper_literal_fill_rule = false;  // see match_orders
  double initial_capital = 100.0;

  void validate() const;
};

enum class Side : std::uint8_t { buy, sell };
enum class Role : std::uint8_t { maker, taker };

struct Order {
  double price = 0.0;
  double qty = 0.0;
  double notional() const { return price * qty; }
};

struct Quotes {
  std::optional<Order> sell;
  std::optional<Order> buy;
};

struct Fill {
  Side side;
  double price;
  double qty;
  Role role;
  double fee;  // signed USD; negative is a rebate
};

struct BookkeepingState {
  double cash = 0.0;
  double inventory = 0.0;  // base asset, signed
  double last_mid = 0.0;
  double equity(double mid) const { return cash + inventory * mid; }
};

struct StepRecord {
  std::int64_t ts_ms = 0;  // fill-evaluation snapshot time
  double pnl = 0.0;
  double equity = 0.0;
  double inventory = 0.0;
  double mid = 0.0;
  std::vector<Fill> fills;
};

struct PnlSeries {
  double initial_capital = 0.0;
  std::vector<StepRecord> steps;

  std::vector<double> pnl_vector() const;
  std::vector<double> equity_curve() const;
};

// Symmetric quotes around the predicted mid, each side sized to
// max_side_notional at its own limit price. A side is suppressed when
// filling it would push the inventory notional beyond the cap.
Quotes quote(double pred_mid, const StrategyConfig& cfg, double inventory);

// Fill logic against the next snapshot and the trade prints in (t, t_next]:
//  (a) taker: sell crosses when its price <= next best bid (buy: price >=
//      next best ask); filled in full at the order's own limit price unless
//      taker_at_touch.
//  (b) maker: a non-crossing sell fills if any print traded at or above its
//      price (buy: at or below), at the order's price with the maker fee.
//  (c) otherwise the order is cancelled; quotes are refreshed every step.
// paper_literal_fill_rule swaps (a)'s comparison to the inverted form the
// source text states, for side-by-side comparison only.
std::vector<Fill> match_orders(const Quotes& quotes,
                               const lob::LobSnapshot& next_snapshot,
                               const std::vector<lob::TradeEvent>& trades,
                               std::size_t trade_begin, std::size_t trade_end,
                               const StrategyConfig& cfg);

// Applies fills and the mark-to-market move; returns pnl_i and updates the
// state. pnl_i = cash_flow + inv_after*mid_next - inv_before*mid_prev - fees.
double step_pnl(BookkeepingState& state, const std::vector<Fill>& fills,
                double mid_next);

// Predictor surface the engine consumes; supplied samples contain only
// information at or before the anchor timestamp.
class MidPredictor {
 public:
  virtual ~MidPredictor() = default;
  virtual double predict_mid(const sampling::Sample& sample) = 0;
};

PnlSeries run_backtest(const lob::SnapshotSeries& series,
                       const std::vector<lob::TradeEvent>& trades,
                       MidPredictor& predictor, const sampling::SampleSpec& spec,
                       const StrategyConfig& cfg);

// CSV columns: ts_ms, pnl, cum_pnl, equity, inventory, fill_side,
// fill_price, fill_qty, fill_role, fee. Multiple fills in one step are
// semicolon-joined inside the fill cells.
void export_pnl_csv(const PnlSeries& series, const std::string& path,
                    const std::string& config_comment = "");

}  // namespace lobforge::backtest
