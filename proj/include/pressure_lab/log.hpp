#pragma once

#include <string_view>

namespace pressure_lab::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Active level; initialised from PRESSURE_LAB_LOG on first use (default warn).
Level level() noexcept;
void set_level(Level lvl) noexcept;
bool parse_level(std::string_view text, Level& out) noexcept;

void write(Level lvl, std::string_view message);

inline void error(std::string_view m) { write(Level::Error, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void debug(std::string_view m) { write(Level::Debug, m); }

}  // namespace pressure_lab::log
