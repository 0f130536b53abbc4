#pragma once

#include <string>
#include <string_view>

#include "lobforge/lob/types.hpp"

namespace lobforge::lob {

// One JSON-Lines record:
//   {"ts_ms":int, "symbol":str, "asks":[[price,qty]xD], "bids":[[price,qty]xD]}
// price/qty may be numbers or decimal strings. Ladders are re-sorted into
// canonical order if supplied unsorted.
LobSnapshot parse_snapshot(std::string_view line);

// {"ts_ms":int, "symbol":str, "price":num, "qty":num, "side":"buy"|"sell"}
TradeEvent parse_trade(std::string_view line);

std::string serialize_snapshot(const LobSnapshot& s);
std::string serialize_trade(const TradeEvent& t);

}  // namespace lobforge::lob
