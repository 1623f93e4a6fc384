#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace ctxcent::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// CTXCENT_LOG in {error, warn, info, debug}; default info.
inline Level& level() {
    static Level current = [] {
        const char* env = std::getenv("CTXCENT_LOG");
        if (env) {
            if (std::strcmp(env, "error") == 0) return Level::error;
            if (std::strcmp(env, "warn") == 0) return Level::warn;
            if (std::strcmp(env, "info") == 0) return Level::info;
            if (std::strcmp(env, "debug") == 0) return Level::debug;
        }
        return Level::info;
    }();
    return current;
}

inline void emit(Level at, const char* tag, const char* fmt, va_list args) {
    if (at > level())
        return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

inline void error(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::error, "error", fmt, args);
    va_end(args);
}

inline void warn(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::warn, "warn", fmt, args);
    va_end(args);
}

inline void info(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::info, "info", fmt, args);
    va_end(args);
}

inline void debug(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    emit(Level::debug, "debug", fmt, args);
    va_end(args);
}

} // namespace ctxcent::logging
