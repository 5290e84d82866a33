#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace gridemt::log {

// =============================================================================
// Logging
// =============================================================================
//
// Verbosity is controlled by the GRIDEMT_LOG environment variable:
//   off | warn | info | debug   (default: warn). Output goes to stderr.

enum class Level : int { off = 0, warn = 1, info = 2, debug = 3 };

inline Level threshold() {
    static const Level lvl = [] {
        const char* env = std::getenv("GRIDEMT_LOG");
        if (!env) return Level::warn;
        if (std::strcmp(env, "off") == 0) return Level::off;
        if (std::strcmp(env, "warn") == 0) return Level::warn;
        if (std::strcmp(env, "info") == 0) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

template <typename... Args>
void emit(Level lvl, const char* tag, const char* fmt, Args... args) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    std::fprintf(stderr, "[gridemt:%s] ", tag);
    if constexpr (sizeof...(Args) == 0) {
        std::fputs(fmt, stderr);
    } else {
        std::fprintf(stderr, fmt, args...);
    }
    std::fputc('\n', stderr);
}

template <typename... Args>
void warn(const char* fmt, Args... args) { emit(Level::warn, "warn", fmt, args...); }
template <typename... Args>
void info(const char* fmt, Args... args) { emit(Level::info, "info", fmt, args...); }
template <typename... Args>
void debug(const char* fmt, Args... args) { emit(Level::debug, "debug", fmt, args...); }

} // namespace gridemt::log
