#include "lobforge/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace lobforge::log {

namespace {

Level parse_env() {
  const char* v = std::getenv("LOBFORGE_LOG");
  if (!v) return Level::warn;
  std::string s(v);
  if (s == "debug") return Level::debug;
  if (s == "info") return Level::info;
  if (s == "warn") return Level::warn;
  if (s == "error") return Level::error;
  if (s == "off") return Level::off;
  return Level::warn;
}

Level g_threshold = parse_env();
std::mutex g_mutex;

const char* tag(Level lv) {
  switch (lv) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "?";
  }
}

}  // namespace

Level threshold() { return g_threshold; }
void set_threshold(Level lv) { g_threshold = lv; }

void write(Level lv, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[lobforge " << tag(lv) << "] " << msg << "\n";
}

}  // namespace lobforge::log
