#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "lobforge/cli/cli.hpp"
#include "lobforge/errors.hpp"

using namespace lobforge;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("lobforge_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("full pipeline smoke on a synthetic fixture") {
  Workspace ws;

  // 1. synthetic tape (1,000 snapshots)
  CHECK(cli::run({"synth", "--kind", "drift", "--snapshots", "1000", "--depth",
                  "8", "--drift", "0.05", "--trade-rate", "2", "--seed", "7",
                  "--symbol", "SYNUSDT", "--out", ws.p("data")}) == 0);
  REQUIRE(fs::exists(ws.p("data/tape.jsonl")));
  REQUIRE(fs::exists(ws.p("data/trades.jsonl")));

  // 2. ingest (idempotent canonicalization)
  CHECK(cli::run({"ingest", "--in", ws.p("data/tape.jsonl"), "--symbol",
                  "SYNUSDT", "--out", ws.p("tape.jsonl"), "--trades-in",
                  ws.p("data/trades.jsonl"), "--trades-out",
                  ws.p("trades.jsonl")}) == 0);

  // 3. frame images
  CHECK(cli::run({"embed", "--tape", ws.p("tape.jsonl"), "--symbol", "SYNUSDT",
                  "--limit", "3", "--out", ws.p("frames")}) == 0);
  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(ws.p("frames")))
    if (e.path().extension() == ".png") ++pngs;
  CHECK(pngs == 3);

  // 4. train/test sample sets (disjoint time ranges)
  CHECK(cli::run({"sample", "--tape", ws.p("tape.jsonl"), "--symbol", "SYNUSDT",
                  "--aggregation", "4w", "--horizon-ms", "400", "--split",
                  "train", "--to-ms", "1700000140000", "--out",
                  ws.p("train.lobs")}) == 0);
  CHECK(cli::run({"sample", "--tape", ws.p("tape.jsonl"), "--symbol", "SYNUSDT",
                  "--aggregation", "4w", "--horizon-ms", "400", "--split",
                  "test", "--from-ms", "1700000140001", "--out",
                  ws.p("test.lobs")}) == 0);

  // 5. train a small model
  CHECK(cli::run({"train", "--samples", ws.p("train.lobs"), "--arch",
                  "SimpleCNN", "--epochs", "4", "--batch", "32", "--seed",
                  "11", "--out", ws.p("model.lobm")}) == 0);

  // 6. forecasts + metrics
  CHECK(cli::run({"predict", "--checkpoint", ws.p("model.lobm"), "--samples",
                  ws.p("test.lobs"), "--report", ws.p("metrics.json"), "--out",
                  ws.p("forecasts.csv")}) == 0);
  CHECK(fs::exists(ws.p("metrics.json")));

  // 7. replay the strategy on the held-out range
  CHECK(cli::run({"backtest", "--checkpoint", ws.p("model.lobm"), "--tape",
                  ws.p("tape.jsonl"), "--trades", ws.p("trades.jsonl"),
                  "--symbol", "SYNUSDT", "--from-ms", "1700000140001",
                  "--summary", ws.p("bt.json"), "--out", ws.p("pnl.csv")}) == 0);
  CHECK(fs::exists(ws.p("bt.json")));

  // 8. report
  CHECK(cli::run({"report", "--pnl", ws.p("pnl.csv"), "--out",
                  ws.p("report")}) == 0);
  CHECK(fs::exists(ws.p("report/pnl_curves.svg")));
  CHECK(fs::exists(ws.p("report/summary.json")));

  SUBCASE("artifacts embed the resolved config") {
    std::ifstream f(ws.p("pnl.csv"));
    std::string first;
    std::getline(f, first);
    CHECK(first.rfind("# {", 0) == 0);
    CHECK(first.find("\"seed\"") != std::string::npos);
  }
}

TEST_CASE("determinism: same config and seed give byte-identical artifacts") {
  Workspace ws;
  REQUIRE(cli::run({"synth", "--kind", "meanrev", "--snapshots", "400",
                    "--depth", "6", "--trade-rate", "2", "--seed", "3",
                    "--symbol", "SYN", "--out", ws.p("d")}) == 0);
  REQUIRE(cli::run({"sample", "--tape", ws.p("d/tape.jsonl"), "--symbol", "SYN",
                    "--aggregation", "3w", "--horizon-ms", "400", "--split",
                    "train", "--out", ws.p("a.lobs")}) == 0);
  REQUIRE(cli::run({"sample", "--tape", ws.p("d/tape.jsonl"), "--symbol", "SYN",
                    "--aggregation", "3w", "--horizon-ms", "400", "--split",
                    "train", "--out", ws.p("b.lobs")}) == 0);
  CHECK(slurp(ws.p("a.lobs")) == slurp(ws.p("b.lobs")));

  for (const char* name : {"m1.lobm", "m2.lobm"})
    REQUIRE(cli::run({"train", "--samples", ws.p("a.lobs"), "--arch",
                      "SimpleCNN", "--epochs", "2", "--seed", "5", "--out",
                      ws.p(name)}) == 0);
  CHECK(slurp(ws.p("m1.lobm")) == slurp(ws.p("m2.lobm")));

  for (const char* name : {"p1.csv", "p2.csv"})
    REQUIRE(cli::run({"backtest", "--checkpoint", ws.p("m1.lobm"), "--tape",
                      ws.p("d/tape.jsonl"), "--trades", ws.p("d/trades.jsonl"),
                      "--symbol", "SYN", "--out", ws.p(name)}) == 0);
  auto pnl1 = slurp(ws.p("p1.csv"));
  auto pnl2 = slurp(ws.p("p2.csv"));
  CHECK(pnl1 == pnl2);
}

TEST_CASE("validation errors produce distinct nonzero exits") {
  Workspace ws;
  REQUIRE(cli::run({"synth", "--snapshots", "120", "--depth", "4", "--seed",
                    "9", "--symbol", "SYN", "--out", ws.p("d")}) == 0);

  SUBCASE("horizon shorter than the snapshot interval") {
    CHECK(cli::run({"sample", "--tape", ws.p("d/tape.jsonl"), "--symbol", "SYN",
                    "--aggregation", "3w", "--horizon-ms", "50", "--out",
                    ws.p("x.lobs")}) == kExitUsage);
  }
  SUBCASE("missing input file") {
    CHECK(cli::run({"ingest", "--in", ws.p("nope.jsonl"), "--out",
                    ws.p("y.jsonl")}) == kExitIo);
  }
  SUBCASE("bad flag value") {
    CHECK(cli::run({"sample", "--tape", ws.p("d/tape.jsonl"), "--aggregation",
                    "3q", "--out", ws.p("z.lobs")}) == kExitUsage);
  }
  SUBCASE("unknown subcommand") {
    CHECK(cli::run({"frobnicate"}) == kExitUsage);
  }
  SUBCASE("empty time filter") {
    CHECK(cli::run({"ingest", "--in", ws.p("d/tape.jsonl"), "--from-ms", "1",
                    "--to-ms", "2", "--out", ws.p("w.jsonl")}) == kExitData);
  }
}

TEST_CASE("config file values apply beneath explicit flags") {
  Workspace ws;
  REQUIRE(cli::run({"synth", "--snapshots", "200", "--depth", "4", "--seed",
                    "13", "--symbol", "SYN", "--out", ws.p("d")}) == 0);
  {
    std::ofstream f(ws.p("run.json"));
    f << R"({"aggregation":"5w","horizon_ms":600,"symbol":"SYN"})";
  }
  // config drives aggregation; flag overrides horizon
  REQUIRE(cli::run({"sample", "--config", ws.p("run.json"), "--tape",
                    ws.p("d/tape.jsonl"), "--horizon-ms", "400", "--out",
                    ws.p("c.lobs")}) == 0);
  // verify by re-loading: the embedded spec should say 5w / 400ms
  // (cheap check: the file must load and the config echo should contain both)
  std::ifstream f(ws.p("c.lobs"), std::ios::binary);
  std::string blob((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  CHECK(blob.find("\"frame_count\":5") != std::string::npos);
  CHECK(blob.find("\"horizon_ms\":400") != std::string::npos);
}

TEST_CASE("analyze correlates trade tapes") {
  Workspace ws;
  REQUIRE(cli::run({"synth", "--snapshots", "600", "--depth", "4", "--seed", "21",
                    "--trade-rate", "3", "--symbol", "AAA", "--out",
                    ws.p("a")}) == 0);
  REQUIRE(cli::run({"synth", "--snapshots", "600", "--depth", "4", "--seed", "22",
                    "--trade-rate", "3", "--symbol", "BBB", "--out",
                    ws.p("b")}) == 0);
  CHECK(cli::run({"analyze", ws.p("a/trades.jsonl"), ws.p("b/trades.jsonl"),
                  "--bucket-ms", "5000", "--out", ws.p("corr")}) == 0);
  CHECK(fs::exists(ws.p("corr/volume_corr.csv")));
  CHECK(fs::exists(ws.p("corr/volume_corr.svg")));
}

TEST_CASE("mixed and one-shot sample construction through the CLI") {
  Workspace ws;
  for (const auto& [sym, seed] : std::vector<std::pair<std::string, std::string>>{
           {"AAA", "51"}, {"BBB", "52"}}) {
    REQUIRE(cli::run({"synth", "--snapshots", "300", "--depth", "5", "--seed",
                      seed, "--symbol", sym, "--out", ws.p(sym)}) == 0);
    REQUIRE(cli::run({"sample", "--tape", ws.p(sym + "/tape.jsonl"), "--symbol",
                      sym, "--aggregation", "3w", "--horizon-ms", "400",
                      "--out", ws.p(sym + ".lobs")}) == 0);
  }

  SUBCASE("mixed union keeps both symbols") {
    REQUIRE(cli::run({"sample", "--tape", ws.p("AAA/tape.jsonl"), "--symbol",
                      "AAA", "--aggregation", "3w", "--horizon-ms", "400",
                      "--mix-with", ws.p("BBB.lobs"), "--out",
                      ws.p("mixed.lobs")}) == 0);
    std::ifstream f(ws.p("mixed.lobs"), std::ios::binary);
    std::string blob((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    CHECK(blob.find("AAA") != std::string::npos);
    CHECK(blob.find("BBB") != std::string::npos);
  }
  SUBCASE("one-shot pairing doubles channels and trains a 2-output model") {
    REQUIRE(cli::run({"sample", "--tape", ws.p("AAA/tape.jsonl"), "--symbol",
                      "AAA", "--aggregation", "3w", "--horizon-ms", "400",
                      "--oneshot-with", ws.p("BBB.lobs"), "--align-tol-ms",
                      "100", "--out", ws.p("pair.lobs")}) == 0);
    CHECK(cli::run({"train", "--samples", ws.p("pair.lobs"), "--arch",
                    "CNN2LSTM", "--epochs", "1", "--seed", "53", "--out",
                    ws.p("pair.lobm")}) == 0);
    CHECK(cli::run({"predict", "--checkpoint", ws.p("pair.lobm"), "--samples",
                    ws.p("pair.lobs"), "--out", ws.p("pair.csv")}) == 0);
  }
}
