#pragma once

#include <cstdio>
#include <string>

namespace adstest::log {

enum class Level { quiet = 0, warn = 1, info = 2, debug = 3 };

// Level comes from ADSTEST_LOG (quiet|warn|info|debug), default warn.
Level level();
void set_level(Level lv);

void write(Level lv, const std::string& msg);

inline void warn(const std::string& msg) { write(Level::warn, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

} // namespace adstest::log
