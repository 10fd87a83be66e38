#include "pressure_lab/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace pressure_lab::log {
namespace {

Level initial_level() {
    Level lvl = Level::Warn;
    if (const char* env = std::getenv("PRESSURE_LAB_LOG")) parse_level(env, lvl);
    return lvl;
}

std::atomic<Level>& active() {
    static std::atomic<Level> lvl{initial_level()};
    return lvl;
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

constexpr std::string_view tag(Level lvl) {
    switch (lvl) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

}  // namespace

Level level() noexcept { return active().load(); }

void set_level(Level lvl) noexcept { active().store(lvl); }

bool parse_level(std::string_view text, Level& out) noexcept {
    if (text == "error") out = Level::Error;
    else if (text == "warn") out = Level::Warn;
    else if (text == "info") out = Level::Info;
    else if (text == "debug") out = Level::Debug;
    else return false;
    return true;
}

void write(Level lvl, std::string_view message) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) return;
    std::lock_guard lock(sink_mutex());
    std::cerr << "[pressure-lab " << tag(lvl) << "] " << message << '\n';
}

}  // namespace pressure_lab::log
