#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lobforge/backtest/engine.hpp"
#include "lobforge/errors.hpp"
#include "lobforge/lob/parse.hpp"
#include "lobforge/metrics/metrics.hpp"
#include "lobforge/rng.hpp"
#include "lobforge/synth/generator.hpp"

using namespace lobforge;
using backtest::Fill;
using backtest::Role;
using backtest::Side;

namespace {

lob::LobSnapshot book_around(double mid, std::int64_t ts, std::size_t depth = 3,
                             double tick = 0.1) {
  lob::LobSnapshot s;
  s.ts_ms = ts;
  s.symbol = "T";
  for (std::size_t d = 0; d < depth; ++d) {
    const double offs = tick / 2 + tick * static_cast<double>(d);
    s.asks.push_back({mid + offs, 1.0 + static_cast<double>(d)});
    s.bids.push_back({mid - offs, 1.5 + static_cast<double>(d)});
  }
  return s;
}

lob::TradeEvent print_at(double price, std::int64_t ts) {
  lob::TradeEvent t;
  t.ts_ms = ts;
  t.symbol = "T";
  t.price = price;
  t.qty = 0.01;
  t.side = lob::TakerSide::buy;
  return t;
}

struct FixedPredictor final : backtest::MidPredictor {
  double value;
  explicit FixedPredictor(double v) : value(v) {}
  double predict_mid(const sampling::Sample&) override { return value; }
};

struct PersistencePredictor final : backtest::MidPredictor {
  double predict_mid(const sampling::Sample& s) override {
    return s.anchor_mid();
  }
};

struct LookaheadRecorder final : backtest::MidPredictor {
  std::vector<std::int64_t> anchors;
  double predict_mid(const sampling::Sample& s) override {
    anchors.push_back(s.t_anchor_ms);
    return s.anchor_mid();
  }
};

}  // namespace

TEST_CASE("quote arithmetic from the strategy defaults") {
  backtest::StrategyConfig cfg;  // spread 0.1, size 5
  const auto q = backtest::quote(100.0, cfg, 0.0);
  REQUIRE(q.sell.has_value());
  REQUIRE(q.buy.has_value());
  CHECK(q.sell->price == doctest::Approx(100.05));
  CHECK(q.buy->price == doctest::Approx(99.95));
  CHECK(q.sell->qty == doctest::Approx(5.0 / 100.05));
  CHECK(q.buy->qty == doctest::Approx(5.0 / 99.95));
  CHECK(q.sell->notional() == doctest::Approx(5.0));
  CHECK(q.buy->notional() == doctest::Approx(5.0));
}

TEST_CASE("quote suppression at the inventory cap") {
  backtest::StrategyConfig cfg;
  SUBCASE("long 5 USD suppresses the buy side") {
    const double inv = 5.0 / 100.0;  // 5 USD at mid 100
    const auto q = backtest::quote(100.0, cfg, inv);
    CHECK(!q.buy.has_value());
    CHECK(q.sell.has_value());
  }
  SUBCASE("short 5 USD suppresses the sell side") {
    const double inv = -5.0 / 100.0;
    const auto q = backtest::quote(100.0, cfg, inv);
    CHECK(q.buy.has_value());
    CHECK(!q.sell.has_value());
  }
  SUBCASE("flat inventory quotes both sides") {
    const auto q = backtest::quote(100.0, cfg, 0.0);
    CHECK(q.buy.has_value());
    CHECK(q.sell.has_value());
  }
}

TEST_CASE("match_orders hand traces") {
  backtest::StrategyConfig cfg;
  const std::vector<lob::TradeEvent> no_trades;

  SUBCASE("sell crossing the next best bid fills as taker at its own price") {
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 5.0 / 100.05};
    const auto next = book_around(100.101, 2);  // best bid 100.051 > 100.05
    const auto fills = backtest::match_orders(q, next, no_trades, 0, 0, cfg);
    REQUIRE(fills.size() == 1);
    CHECK(fills[0].side == Side::sell);
    CHECK(fills[0].role == Role::taker);
    CHECK(fills[0].price == doctest::Approx(100.05));
    CHECK(fills[0].fee == doctest::Approx(5.0 * 0.0005));
  }
  SUBCASE("non-crossing sell fills as maker on a qualifying print") {
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 5.0 / 100.05};
    const auto next = book_around(99.95, 2);  // best bid 99.90 < 100.05
    const std::vector<lob::TradeEvent> trades{print_at(100.07, 1)};
    const auto fills = backtest::match_orders(q, next, trades, 0, 1, cfg);
    REQUIRE(fills.size() == 1);
    CHECK(fills[0].role == Role::maker);
    CHECK(fills[0].price == doctest::Approx(100.05));
    CHECK(fills[0].fee == doctest::Approx(-5.0 * 0.0001));  // rebate
  }
  SUBCASE("no cross, no qualifying print: cancelled") {
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 0.05};
    q.buy = backtest::Order{99.95, 0.05};
    const auto next = book_around(100.0, 2);
    const std::vector<lob::TradeEvent> trades{print_at(100.0, 1)};
    const auto fills = backtest::match_orders(q, next, trades, 0, 1, cfg);
    CHECK(fills.empty());
  }
  SUBCASE("buy crossing the next best ask fills as taker") {
    backtest::Quotes q;
    q.buy = backtest::Order{100.10, 5.0 / 100.10};
    const auto next = book_around(100.0, 2);  // best ask 100.05 <= 100.10
    const auto fills = backtest::match_orders(q, next, no_trades, 0, 0, cfg);
    REQUIRE(fills.size() == 1);
    CHECK(fills[0].side == Side::buy);
    CHECK(fills[0].role == Role::taker);
  }
  SUBCASE("maker fills require the trade tape to be enabled") {
    backtest::StrategyConfig no_tape = cfg;
    no_tape.use_trade_tape = false;
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 0.05};
    const auto next = book_around(99.95, 2);
    const std::vector<lob::TradeEvent> trades{print_at(100.07, 1)};
    CHECK(backtest::match_orders(q, next, trades, 0, 1, no_tape).empty());
  }
  SUBCASE("taker_at_touch executes at the touch instead of the limit") {
    backtest::StrategyConfig touch = cfg;
    touch.taker_at_touch = true;
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 0.05};
    const auto next = book_around(100.101, 2);
    const auto fills = backtest::match_orders(q, next, no_trades, 0, 0, touch);
    REQUIRE(fills.size() == 1);
    CHECK(fills[0].price == doctest::Approx(100.051));
  }
  SUBCASE("paper-literal rule inverts the crossing comparison") {
    backtest::StrategyConfig lit = cfg;
    lit.paper_literal_fill_rule = true;
    backtest::Quotes q;
    q.sell = backtest::Order{100.05, 0.05};
    // sell price > best bid -> "executed as market order" per the text
    const auto next = book_around(99.95, 2);
    const auto fills = backtest::match_orders(q, next, no_trades, 0, 0, lit);
    REQUIRE(fills.size() == 1);
    CHECK(fills[0].role == Role::taker);
  }
}

TEST_CASE("step_pnl hand cases") {
  SUBCASE("no fills, flat inventory") {
    backtest::BookkeepingState st{100.0, 0.0, 100.0};
    CHECK(backtest::step_pnl(st, {}, 101.0) == 0.0);
    CHECK(st.last_mid == 101.0);
  }
  SUBCASE("buy then mark-to-market: +0.05 over two steps") {
    backtest::BookkeepingState st{100.0, 0.0, 100.0};
    const Fill buy{Side::buy, 100.0, 0.05, Role::taker, 0.0};
    const double pnl1 = backtest::step_pnl(st, {buy}, 100.0);
    CHECK(pnl1 == doctest::Approx(0.0));
    const double pnl2 = backtest::step_pnl(st, {}, 101.0);
    CHECK(pnl2 == doctest::Approx(0.05));
    CHECK(pnl1 + pnl2 == doctest::Approx(0.05));
  }
  SUBCASE("maker rebate at unchanged mid is exactly the rebate") {
    backtest::BookkeepingState st{100.0, 0.0, 128.0};
    const double qty = 5.0 / 128.0;  // exact in binary
    const Fill buy{Side::buy, 128.0, qty, Role::maker, -(5.0 * 0.0001)};
    const double pnl = backtest::step_pnl(st, {buy}, 128.0);
    CHECK(pnl == 5.0 * 0.0001);  // exact
  }
  SUBCASE("inventory and cash update") {
    backtest::BookkeepingState st{100.0, 0.0, 100.0};
    const Fill buy{Side::buy, 99.0, 0.02, Role::taker, 0.001};
    backtest::step_pnl(st, {buy}, 100.0);
    CHECK(st.inventory == doctest::Approx(0.02));
    CHECK(st.cash == doctest::Approx(100.0 - 99.0 * 0.02 - 0.001));
  }
}

TEST_CASE("flat tape with no trades produces all-zero pnl") {
  synth::TapeConfig cfg;
  cfg.kind = synth::TapeKind::flat;
  cfg.snapshots = 50;
  cfg.depth = 4;
  cfg.trade_rate = 0.0;
  const auto tape = synth::generate_tape(cfg);

  sampling::SampleSpec spec;
  spec.frame_count = 5;
  spec.horizon_ms = 200;
  PersistencePredictor pred;
  const auto pnl = backtest::run_backtest(tape.series, tape.trades, pred, spec, {});
  REQUIRE(!pnl.steps.empty());
  for (const auto& s : pnl.steps) {
    CHECK(s.pnl == 0.0);
    CHECK(s.fills.empty());
    CHECK(s.inventory == 0.0);
  }
}

TEST_CASE("accounting identity and position cap on an active tape") {
  synth::TapeConfig cfg;
  cfg.kind = synth::TapeKind::meanrev;
  cfg.snapshots = 600;
  cfg.depth = 4;
  cfg.trade_rate = 2.0;
  cfg.seed = 77;
  const auto tape = synth::generate_tape(cfg);

  sampling::SampleSpec spec;
  spec.frame_count = 4;
  spec.horizon_ms = 200;
  PersistencePredictor pred;
  backtest::StrategyConfig scfg;
  const auto pnl = backtest::run_backtest(tape.series, tape.trades, pred, spec, scfg);

  std::size_t n_fills = 0;
  for (const auto& s : pnl.steps) n_fills += s.fills.size();
  CHECK(n_fills > 10);  // the tape actually exercises fills

  SUBCASE("equity_N - equity_0 == sum(pnl) to 1e-9") {
    double sum = 0.0;
    for (const auto& s : pnl.steps) sum += s.pnl;
    const double equity_delta = pnl.steps.back().equity - pnl.initial_capital;
    CHECK(std::abs(equity_delta - sum) <= 1e-9);
  }
  SUBCASE("per-step equity telescopes") {
    double prev = pnl.initial_capital;
    // equity_0 is the capital before the first step
    for (const auto& s : pnl.steps) {
      CHECK(std::abs((s.equity - prev) - s.pnl) <= 1e-9);
      prev = s.equity;
    }
  }
  SUBCASE("position cap never violated") {
    for (const auto& s : pnl.steps)
      CHECK(std::abs(s.inventory * s.mid) <=
            2.0 * scfg.max_side_notional + 1e-6);
  }
  SUBCASE("determinism: identical inputs give bit-identical series") {
    PersistencePredictor pred2;
    const auto pnl2 =
        backtest::run_backtest(tape.series, tape.trades, pred2, spec, scfg);
    REQUIRE(pnl2.steps.size() == pnl.steps.size());
    for (std::size_t i = 0; i < pnl.steps.size(); ++i) {
      CHECK(pnl2.steps[i].pnl == pnl.steps[i].pnl);
      CHECK(pnl2.steps[i].equity == pnl.steps[i].equity);
      CHECK(pnl2.steps[i].inventory == pnl.steps[i].inventory);
    }
  }
}

TEST_CASE("maker fills with negative fees strictly increase pnl") {
  // Same fixture with and without the rebate: rebate run must dominate.
  synth::TapeConfig cfg;
  cfg.kind = synth::TapeKind::flat;
  cfg.snapshots = 300;
  cfg.depth = 4;
  cfg.trade_rate = 3.0;
  cfg.seed = 78;
  const auto tape = synth::generate_tape(cfg);
  sampling::SampleSpec spec;
  spec.frame_count = 3;
  spec.horizon_ms = 200;

  backtest::StrategyConfig rebate;
  rebate.maker_fee_rate = -0.0001;
  backtest::StrategyConfig zero_fee = rebate;
  zero_fee.maker_fee_rate = 0.0;

  PersistencePredictor p1, p2;
  const auto with_rebate =
      backtest::run_backtest(tape.series, tape.trades, p1, spec, rebate);
  const auto without =
      backtest::run_backtest(tape.series, tape.trades, p2, spec, zero_fee);

  double maker_notional = 0.0;
  for (const auto& s : with_rebate.steps)
    for (const auto& f : s.fills)
      if (f.role == Role::maker) maker_notional += f.price * f.qty;
  REQUIRE(maker_notional > 0.0);

  const double total_rebate = metrics::total_pnl(with_rebate.pnl_vector());
  const double total_zero = metrics::total_pnl(without.pnl_vector());
  CHECK(total_rebate > total_zero);
  CHECK(total_rebate - total_zero ==
        doctest::Approx(maker_notional * 0.0001).epsilon(1e-9));
}

TEST_CASE("no-lookahead: the predictor only sees data at or before the anchor") {
  synth::TapeConfig cfg;
  cfg.kind = synth::TapeKind::drift;
  cfg.snapshots = 60;
  cfg.depth = 3;
  cfg.trade_rate = 0.5;
  const auto tape = synth::generate_tape(cfg);
  sampling::SampleSpec spec;
  spec.frame_count = 5;
  spec.horizon_ms = 200;
  LookaheadRecorder rec;
  const auto pnl = backtest::run_backtest(tape.series, tape.trades, rec, spec, {});
  REQUIRE(rec.anchors.size() == pnl.steps.size());
  // anchors are the snapshot timestamps in order, each strictly before the
  // step's fill-evaluation time
  for (std::size_t i = 0; i < rec.anchors.size(); ++i)
    CHECK(rec.anchors[i] < pnl.steps[i].ts_ms);
}

TEST_CASE("perfect foresight with zero fees never loses on a trending tape") {
  synth::TapeConfig cfg;
  cfg.kind = synth::TapeKind::drift;
  cfg.snapshots = 400;
  cfg.depth = 4;
  cfg.drift_per_step = 0.05;
  cfg.trade_rate = 3.0;
  cfg.seed = 79;
  const auto tape = synth::generate_tape(cfg);

  struct Foresight final : backtest::MidPredictor {
    const lob::SnapshotSeries* series;
    std::size_t next_idx = 0;
    double predict_mid(const sampling::Sample& s) override {
      // true next mid: find the snapshot after the anchor
      while (next_idx < series->size() &&
             (*series)[next_idx].ts_ms <= s.t_anchor_ms)
        ++next_idx;
      return lob::mid_price((*series)[next_idx]);
    }
  } pred;
  pred.series = &tape.series;

  sampling::SampleSpec spec;
  spec.frame_count = 2;
  spec.horizon_ms = 200;
  backtest::StrategyConfig scfg;
  scfg.maker_fee_rate = 0.0;
  scfg.taker_fee_rate = 0.0;
  const auto pnl = backtest::run_backtest(tape.series, tape.trades, pred, spec, scfg);
  CHECK(metrics::total_pnl(pnl.pnl_vector()) >= 0.0);
}

TEST_CASE("backtest validates its configuration") {
  backtest::StrategyConfig bad;
  bad.quote_spread = 0.0;
  synth::TapeConfig cfg;
  cfg.snapshots = 30;
  cfg.depth = 3;
  const auto tape = synth::generate_tape(cfg);
  sampling::SampleSpec spec;
  spec.frame_count = 2;
  spec.horizon_ms = 200;
  FixedPredictor pred(100.0);
  CHECK_THROWS_AS(backtest::run_backtest(tape.series, tape.trades, pred, spec, bad),
                  ConfigError);

  SUBCASE("short series") {
    auto tiny = tape;
    tiny.series.snapshots.resize(2);
    spec.frame_count = 5;
    CHECK_THROWS_AS(
        backtest::run_backtest(tiny.series, tiny.trades, pred, spec, {}),
        SeriesTooShort);
  }
}
