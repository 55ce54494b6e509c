/*
 * Small shared helpers: stable hashing, deterministic RNG primitives,
 * string normalization and UTF-8 aware slicing.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualmem {

// FNV-1a, 64-bit. Used for provenance hashes and scripted embeddings;
// must stay stable across platforms (std::hash is not).
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

// splitmix64: cheap stateless mixer, used to derive per-word embedding
// streams and seeded sub-generators.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform in [0, n). Modulo bias is irrelevant at our n.
inline std::uint64_t bounded(std::uint64_t& state, std::uint64_t n) {
    return n == 0 ? 0 : splitmix64(state) % n;
}

inline double unit_real(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
}

inline bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Collapses whitespace runs to a single space. Does not trim.
inline std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_ws = false;
    for (unsigned char c : text) {
        if (is_space_byte(c)) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(static_cast<char>(c));
            in_ws = false;
        }
    }
    return out;
}

inline std::string lowercase(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// UTF-8 codepoint count (continuation bytes excluded).
inline std::size_t codepoint_count(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// Byte offset of the n-th codepoint (text.size() if past the end).
inline std::size_t codepoint_to_byte(std::string_view text, std::size_t cp_index) {
    std::size_t cp = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            if (cp == cp_index) return i;
            ++cp;
        }
    }
    return text.size();
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dualmem
