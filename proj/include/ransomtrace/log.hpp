#pragma once

#include <string_view>

namespace ransomtrace::log {

enum class Level { Debug, Info, Warn, Error, Off };

// Default Info; RANSOMTRACE_LOG=debug|info|warn|error|off overrides.
void set_level(Level level);
Level level();

// One line to stderr: "<level> <message>".
void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

} // namespace ransomtrace::log
