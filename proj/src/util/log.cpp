#include "util/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace adstest::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("ADSTEST_LOG");
    if (!v) return Level::warn;
    if (std::strcmp(v, "quiet") == 0) return Level::quiet;
    if (std::strcmp(v, "warn") == 0) return Level::warn;
    if (std::strcmp(v, "info") == 0) return Level::info;
    if (std::strcmp(v, "debug") == 0) return Level::debug;
    return Level::warn;
}

std::atomic<int> g_level{static_cast<int>(parse_env())};
std::mutex g_mutex;

const char* tag(Level lv) {
    switch (lv) {
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
        default: return "";
    }
}

} // namespace

Level level() { return static_cast<Level>(g_level.load(std::memory_order_relaxed)); }

void set_level(Level lv) { g_level.store(static_cast<int>(lv), std::memory_order_relaxed); }

void write(Level lv, const std::string& msg) {
    if (lv == Level::quiet || static_cast<int>(lv) > g_level.load(std::memory_order_relaxed)) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[adstest %s] %s\n", tag(lv), msg.c_str());
    std::fflush(stderr);
}

} // namespace adstest::log
