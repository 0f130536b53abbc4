#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <zlib.h>

#include "lobforge/errors.hpp"
#include "lobforge/lob/parse.hpp"
#include "lobforge/lob/tape.hpp"
#include "lobforge/rng.hpp"

using namespace lobforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lobforge_lob_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

lob::LobSnapshot make_book(std::int64_t ts, double mid, std::size_t depth,
                           double tick = 0.1) {
  lob::LobSnapshot s;
  s.ts_ms = ts;
  s.symbol = "TESTUSDT";
  for (std::size_t d = 0; d < depth; ++d) {
    const double offs = tick / 2 + tick * static_cast<double>(d);
    s.asks.push_back({mid + offs, 1.0 + static_cast<double>(d)});
    s.bids.push_back({mid - offs, 2.0 + static_cast<double>(d)});
  }
  return s;
}

}  // namespace

TEST_CASE("parse_snapshot accepts a minimal valid book") {
  const auto s = lob::parse_snapshot(
      R"({"ts_ms":1,"symbol":"BTCUSDT","asks":[[100.1,1]],"bids":[[99.9,2]]})");
  CHECK(s.depth() == 1);
  CHECK(s.best_ask() == doctest::Approx(100.1));
  CHECK(s.best_bid() == doctest::Approx(99.9));
  CHECK(lob::mid_price(s) == doctest::Approx(100.0));
  CHECK(lob::spread(s) == doctest::Approx(0.2));
}

TEST_CASE("parse_snapshot rejects crossed and touching books") {
  CHECK_THROWS_AS(lob::parse_snapshot(
                      R"({"ts_ms":1,"symbol":"X","asks":[[100.0,1]],"bids":[[100.0,1]]})"),
                  CrossedBook);
  CHECK_THROWS_AS(lob::parse_snapshot(
                      R"({"ts_ms":1,"symbol":"X","asks":[[99.0,1]],"bids":[[100.0,1]]})"),
                  CrossedBook);
}

TEST_CASE("parse_snapshot validates structure and values") {
  CHECK_THROWS_AS(lob::parse_snapshot("{not json"), MalformedRecord);
  CHECK_THROWS_AS(lob::parse_snapshot(R"({"ts_ms":1,"symbol":"X","asks":[[1,1]]})"),
                  MalformedRecord);
  CHECK_THROWS_AS(
      lob::parse_snapshot(
          R"({"ts_ms":1,"symbol":"X","asks":[[100,1,9]],"bids":[[99,1]]})"),
      MalformedRecord);
  CHECK_THROWS_AS(
      lob::parse_snapshot(
          R"({"ts_ms":1,"symbol":"X","asks":[[100,-1]],"bids":[[99,1]]})"),
      NegativeValue);
  CHECK_THROWS_AS(
      lob::parse_snapshot(
          R"({"ts_ms":1,"symbol":"X","asks":[[-100,1]],"bids":[[99,1]]})"),
      NegativeValue);
  CHECK_THROWS_AS(
      lob::parse_snapshot(
          R"({"ts_ms":1,"symbol":"X","asks":[[100,1],[101,1]],"bids":[[99,1]]})"),
      MalformedRecord);
}

TEST_CASE("decimal strings parse exactly") {
  const auto s = lob::parse_snapshot(
      R"({"ts_ms":7,"symbol":"X","asks":[["100.25","1.5"]],"bids":[["99.75","2.25"]]})");
  CHECK(s.asks[0].price == 100.25);
  CHECK(s.asks[0].qty == 1.5);
  CHECK(s.bids[0].price == 99.75);
  CHECK_THROWS_AS(
      lob::parse_snapshot(
          R"({"ts_ms":7,"symbol":"X","asks":[["1.2.3",1]],"bids":[[99,1]]})"),
      MalformedRecord);
}

TEST_CASE("unsorted ladders are canonicalized") {
  const auto s = lob::parse_snapshot(
      R"({"ts_ms":1,"symbol":"X","asks":[[102,1],[100.5,2],[101,3]],)"
      R"("bids":[[99,1],[99.9,2],[99.5,3]]})");
  CHECK(s.asks[0].price == doctest::Approx(100.5));
  CHECK(s.asks[2].price == doctest::Approx(102.0));
  CHECK(s.bids[0].price == doctest::Approx(99.9));
  CHECK(s.bids[2].price == doctest::Approx(99.0));
  CHECK(s.asks[0].qty == doctest::Approx(2.0));
  CHECK(s.bids[0].qty == doctest::Approx(2.0));
}

TEST_CASE("serialize/parse round-trip preserves the snapshot") {
  Xoshiro256ss rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto depth = 1 + rng.below(50);
    auto s = make_book(1000 + trial, 50.0 + rng.uniform(0, 100),
                       static_cast<std::size_t>(depth), 0.05);
    const auto round = lob::parse_snapshot(lob::serialize_snapshot(s));
    CHECK(round == s);
  }
}

TEST_CASE("mid price sits strictly inside the spread") {
  Xoshiro256ss rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = make_book(trial, 80.0 + rng.uniform(0, 40), 5);
    const double mid = lob::mid_price(s);
    CHECK(mid > s.best_bid());
    CHECK(mid < s.best_ask());
    CHECK(lob::spread(s) > 0.0);
  }
}

TEST_CASE("trade parsing") {
  const auto t = lob::parse_trade(
      R"({"ts_ms":5,"symbol":"BTCUSDT","price":100.5,"qty":0.25,"side":"sell"})");
  CHECK(t.price == doctest::Approx(100.5));
  CHECK(t.side == lob::TakerSide::sell);
  CHECK_THROWS_AS(
      lob::parse_trade(
          R"({"ts_ms":5,"symbol":"X","price":100,"qty":0.2,"side":"hold"})"),
      MalformedRecord);
  CHECK_THROWS_AS(
      lob::parse_trade(
          R"({"ts_ms":5,"symbol":"X","price":100,"qty":0,"side":"buy"})"),
      NegativeValue);
}

TEST_CASE("load_tape sorts, filters, dedups and enforces uniform depth") {
  TempDir tmp;
  const std::string path = tmp.file("tape.jsonl");
  {
    std::ofstream f(path);
    f << lob::serialize_snapshot(make_book(300, 100.0, 3)) << "\n";
    f << lob::serialize_snapshot(make_book(100, 100.0, 3)) << "\n";
    auto dup = make_book(200, 100.0, 3);
    f << lob::serialize_snapshot(dup) << "\n";
    dup.asks[0].qty = 42.0;
    f << lob::serialize_snapshot(dup) << "\n";
  }
  const auto series = lob::load_tape(path, "TESTUSDT");
  REQUIRE(series.size() == 3);
  CHECK(series[0].ts_ms == 100);
  CHECK(series[1].ts_ms == 200);
  CHECK(series[2].ts_ms == 300);
  CHECK(series[1].asks[0].qty == doctest::Approx(42.0));  // kept the last

  for (std::size_t i = 1; i < series.size(); ++i)
    CHECK(series[i].ts_ms > series[i - 1].ts_ms);

  SUBCASE("time filter excluding everything throws EmptySeries") {
    CHECK_THROWS_AS(lob::load_tape(path, "TESTUSDT", {1000, 2000}), EmptySeries);
  }
  SUBCASE("time filter narrows the series") {
    const auto part = lob::load_tape(path, "TESTUSDT", {150, 250});
    CHECK(part.size() == 1);
    CHECK(part[0].ts_ms == 200);
  }
  SUBCASE("varying depth is rejected") {
    {
      std::ofstream f(path, std::ios::app);
      f << lob::serialize_snapshot(make_book(400, 100.0, 5)) << "\n";
    }
    CHECK_THROWS_AS(lob::load_tape(path, "TESTUSDT"), MalformedRecord);
  }
}

TEST_CASE("load_tape reads gzip transparently") {
  TempDir tmp;
  const std::string path = tmp.file("tape.jsonl.gz");
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  for (int i = 0; i < 5; ++i) {
    const std::string line =
        lob::serialize_snapshot(make_book(100 * (i + 1), 100.0, 2)) + "\n";
    gzwrite(gz, line.data(), static_cast<unsigned>(line.size()));
  }
  gzclose(gz);
  const auto series = lob::load_tape(path, "TESTUSDT");
  CHECK(series.size() == 5);
  CHECK(series.nominal_interval_ms == 100);
}

TEST_CASE("load_trades filters by symbol and time") {
  TempDir tmp;
  const std::string path = tmp.file("trades.jsonl");
  {
    std::ofstream f(path);
    f << R"({"ts_ms":10,"symbol":"AAA","price":1.0,"qty":1.0,"side":"buy"})" << "\n";
    f << R"({"ts_ms":30,"symbol":"BBB","price":2.0,"qty":1.0,"side":"sell"})" << "\n";
    f << R"({"ts_ms":20,"symbol":"AAA","price":1.5,"qty":2.0,"side":"sell"})" << "\n";
  }
  const auto aaa = lob::load_trades(path, "AAA");
  REQUIRE(aaa.size() == 2);
  CHECK(aaa[0].ts_ms == 10);
  CHECK(aaa[1].ts_ms == 20);
  const auto late = lob::load_trades(path, "AAA", {15, 100});
  CHECK(late.size() == 1);
}

TEST_CASE("missing file raises IoError") {
  CHECK_THROWS_AS(lob::load_tape("/nonexistent/nope.jsonl", "X"), IoError);
}
