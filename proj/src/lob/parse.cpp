#include "lobforge/lob/parse.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "lobforge/errors.hpp"

namespace lobforge::lob {

namespace {

using nlohmann::json;

double to_price_qty(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    std::size_t pos = 0;
    double parsed = 0.0;
    try {
      parsed = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw MalformedRecord(std::string("unparseable ") + what + " '" + s + "'");
    }
    if (pos != s.size())
      throw MalformedRecord(std::string("trailing junk in ") + what + " '" + s + "'");
    return parsed;
  }
  throw MalformedRecord(std::string(what) + " must be a number or decimal string");
}

std::vector<Level> parse_ladder(const json& arr, const char* side) {
  if (!arr.is_array())
    throw MalformedRecord(std::string(side) + " must be an array");
  std::vector<Level> out;
  out.reserve(arr.size());
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2)
      throw MalformedRecord(std::string(side) + " entries must be [price, qty] pairs");
    Level lv;
    lv.price = to_price_qty(pair[0], "price");
    lv.qty = to_price_qty(pair[1], "qty");
    out.push_back(lv);
  }
  return out;
}

json ladder_to_json(const std::vector<Level>& ladder) {
  json arr = json::array();
  for (const auto& lv : ladder) arr.push_back(json::array({lv.price, lv.qty}));
  return arr;
}

}  // namespace

double mid_price(const LobSnapshot& s) {
  return 0.5 * (s.best_ask() + s.best_bid());
}

double spread(const LobSnapshot& s) { return s.best_ask() - s.best_bid(); }

void canonicalize_and_validate(LobSnapshot& s) {
  if (s.asks.empty() || s.bids.empty())
    throw MalformedRecord("both sides must have at least one level");
  if (s.asks.size() != s.bids.size())
    throw MalformedRecord("ask and bid ladders must have equal depth");

  std::sort(s.asks.begin(), s.asks.end(),
            [](const Level& a, const Level& b) { return a.price < b.price; });
  std::sort(s.bids.begin(), s.bids.end(),
            [](const Level& a, const Level& b) { return a.price > b.price; });

  for (const auto* side : {&s.asks, &s.bids}) {
    for (std::size_t i = 0; i < side->size(); ++i) {
      const Level& lv = (*side)[i];
      if (!(lv.price > 0.0) || !std::isfinite(lv.price))
        throw NegativeValue("prices must be positive finite");
      if (lv.qty < 0.0 || !std::isfinite(lv.qty))
        throw NegativeValue("quantities must be non-negative finite");
      if (i > 0 && (*side)[i - 1].price == lv.price)
        throw MalformedRecord("duplicate price level");
    }
  }
  if (s.best_ask() <= s.best_bid())
    throw CrossedBook("best ask " + std::to_string(s.best_ask()) +
                      " <= best bid " + std::to_string(s.best_bid()));
}

LobSnapshot parse_snapshot(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw MalformedRecord(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("ts_ms") || !j.contains("symbol") ||
      !j.contains("asks") || !j.contains("bids"))
    throw MalformedRecord("record needs ts_ms, symbol, asks, bids");

  LobSnapshot s;
  if (!j["ts_ms"].is_number_integer())
    throw MalformedRecord("ts_ms must be an integer");
  s.ts_ms = j["ts_ms"].get<std::int64_t>();
  if (!j["symbol"].is_string())
    throw MalformedRecord("symbol must be a string");
  s.symbol = j["symbol"].get<std::string>();
  s.asks = parse_ladder(j["asks"], "asks");
  s.bids = parse_ladder(j["bids"], "bids");
  canonicalize_and_validate(s);
  return s;
}

TradeEvent parse_trade(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw MalformedRecord(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("ts_ms") || !j.contains("symbol") ||
      !j.contains("price") || !j.contains("qty") || !j.contains("side"))
    throw MalformedRecord("trade needs ts_ms, symbol, price, qty, side");

  TradeEvent t;
  t.ts_ms = j["ts_ms"].get<std::int64_t>();
  t.symbol = j["symbol"].get<std::string>();
  t.price = to_price_qty(j["price"], "price");
  t.qty = to_price_qty(j["qty"], "qty");
  const std::string side = j["side"].get<std::string>();
  if (side == "buy")
    t.side = TakerSide::buy;
  else if (side == "sell")
    t.side = TakerSide::sell;
  else
    throw MalformedRecord("side must be \"buy\" or \"sell\"");
  if (!(t.price > 0.0)) throw NegativeValue("trade price must be positive");
  if (!(t.qty > 0.0)) throw NegativeValue("trade qty must be positive");
  return t;
}

std::string serialize_snapshot(const LobSnapshot& s) {
  json j;
  j["ts_ms"] = s.ts_ms;
  j["symbol"] = s.symbol;
  j["asks"] = ladder_to_json(s.asks);
  j["bids"] = ladder_to_json(s.bids);
  return j.dump();
}

std::string serialize_trade(const TradeEvent& t) {
  json j;
  j["ts_ms"] = t.ts_ms;
  j["symbol"] = t.symbol;
  j["price"] = t.price;
  j["qty"] = t.qty;
  j["side"] = t.side == TakerSide::buy ? "buy" : "sell";
  return j.dump();
}

}  // namespace lobforge::lob
