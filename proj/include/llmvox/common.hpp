// Shared error types, logging, and seed derivation.
#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace llmvox {

// Config or usage mistakes (CLI maps these to exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text longer than the speech-token budget it must align to.
struct AlignmentError : std::runtime_error {
    size_t text_len;
    size_t target_len;
    AlignmentError(size_t m, size_t t)
        : std::runtime_error("alignment error: text sub-token length M=" + std::to_string(m) +
                             " exceeds target length T=" + std::to_string(t)),
          text_len(m), target_len(t) {}
};

struct ContextOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainDivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusParseError : std::runtime_error {
    int line;
    CorpusParseError(int line_no, const std::string& what)
        : std::runtime_error("corpus line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Verbosity comes from LLMVOX_LOG (error|warn|info|debug); default warn.
inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("LLMVOX_LOG");
        if (!env) return LogLevel::kWarn;
        std::string v(env);
        if (v == "error") return LogLevel::kError;
        if (v == "info") return LogLevel::kInfo;
        if (v == "debug") return LogLevel::kDebug;
        return LogLevel::kWarn;
    }();
    return level;
}

inline void log_at(LogLevel lvl, const char* tag, const char* fmt, ...) {
    if (lvl > log_level()) return;
    std::va_list args;
    va_start(args, fmt);
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fprintf(stderr, "\n");
    va_end(args);
}

#define LLMVOX_LOG_ERROR(...) ::llmvox::log_at(::llmvox::LogLevel::kError, "error", __VA_ARGS__)
#define LLMVOX_LOG_WARN(...) ::llmvox::log_at(::llmvox::LogLevel::kWarn, "warn", __VA_ARGS__)
#define LLMVOX_LOG_INFO(...) ::llmvox::log_at(::llmvox::LogLevel::kInfo, "info", __VA_ARGS__)
#define LLMVOX_LOG_DEBUG(...) ::llmvox::log_at(::llmvox::LogLevel::kDebug, "debug", __VA_ARGS__)

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), seed);
}

// Deterministic per-component seed from one master seed.
inline uint64_t derive_seed(uint64_t master, const std::string& component) {
    uint64_t h = fnv1a64(component);
    // splitmix64 finalizer over master ^ component hash
    uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace llmvox
