#include "cgmap/log.hpp"

#include <iostream>
#include <mutex>

namespace cgmap::log {
namespace {

std::mutex g_mutex;
Level g_level = Level::warn;
Sink g_sink;

const char* label(Level level) {
    switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warning";
    case Level::error: return "error";
    case Level::off: break;
    }
    return "";
}

}  // namespace

void set_level(Level level) {
    std::lock_guard lock(g_mutex);
    g_level = level;
}

Level level() {
    std::lock_guard lock(g_mutex);
    return g_level;
}

void set_sink(Sink sink) {
    std::lock_guard lock(g_mutex);
    g_sink = std::move(sink);
}

void write(Level lvl, std::string_view message) {
    std::lock_guard lock(g_mutex);
    if (lvl < g_level || lvl == Level::off)
        return;
    if (g_sink) {
        g_sink(lvl, message);
        return;
    }
    std::cerr << "cgmap: " << label(lvl) << ": " << message << '\n';
}

}  // namespace cgmap::log
