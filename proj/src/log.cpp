#include <ransomtrace/log.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace ransomtrace::log {
namespace {

Level initial_level()
{
    const char* env = std::getenv("RANSOMTRACE_LOG");
    if (!env) return Level::Info;
    const std::string v(env);
    if (v == "debug") return Level::Debug;
    if (v == "warn") return Level::Warn;
    if (v == "error") return Level::Error;
    if (v == "off") return Level::Off;
    return Level::Info;
}

std::atomic<Level>& current()
{
    static std::atomic<Level> lvl{initial_level()};
    return lvl;
}

std::mutex g_write_mu;

} // namespace

void set_level(Level l) { current() = l; }
Level level() { return current(); }

void write(Level l, std::string_view message)
{
    if (l < current() || l == Level::Off) return;
    static constexpr const char* names[] = {"debug", "info", "warn", "error"};
    std::lock_guard lock(g_write_mu);
    std::cerr << names[static_cast<int>(l)] << ' ' << message << '\n';
}

} // namespace ransomtrace::log
