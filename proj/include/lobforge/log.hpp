#pragma once

#include <sstream>
#include <string>

namespace lobforge::log {

enum class Level : int { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Resolved once from LOBFORGE_LOG (debug|info|warn|error|off); default warn.
Level threshold();
void set_threshold(Level lv);
void write(Level lv, const std::string& msg);

namespace detail {
inline void fold(std::ostringstream&) {}
template <typename A, typename... Rest>
void fold(std::ostringstream& os, const A& a, const Rest&... rest) {
  os << a;
  fold(os, rest...);
}
}  // namespace detail

template <typename... Args>
void emit(Level lv, const Args&... args) {
  if (lv < threshold()) return;
  std::ostringstream os;
  detail::fold(os, args...);
  write(lv, os.str());
}

template <typename... Args> void debug(const Args&... a) { emit(Level::debug, a...); }
template <typename... Args> void info(const Args&... a) { emit(Level::info, a...); }
template <typename... Args> void warn(const Args&... a) { emit(Level::warn, a...); }
template <typename... Args> void error(const Args&... a) { emit(Level::error, a...); }

}  // namespace lobforge::log
