/*
 * Deterministic token counting. The heuristic mode approximates commercial
 * tokenizers as ceil(chars / 4) after collapsing whitespace runs; an
 * external hook exists for exact counters.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "dualmem/util.hpp"

namespace dualmem {

struct TokenCounter {
    enum class Mode { heuristic, external };

    Mode mode = Mode::heuristic;
    std::size_t chars_per_token = 4;
    std::function<std::size_t(std::string_view)> external_counter;

    // Deterministic: identical text always yields identical counts.
    // Empty text counts as zero.
    std::size_t count(std::string_view text) const {
        if (text.empty()) return 0;
        if (mode == Mode::external && external_counter) return external_counter(text);
        // Count codepoints with whitespace runs collapsed to one character,
        // without materializing the collapsed string.
        std::size_t chars = 0;
        bool in_ws = false;
        for (unsigned char c : text) {
            if (is_space_byte(c)) {
                if (!in_ws) ++chars;
                in_ws = true;
            } else {
                in_ws = false;
                if ((c & 0xC0) != 0x80) ++chars;
            }
        }
        return (chars + chars_per_token - 1) / chars_per_token;
    }
};

inline std::size_t count_tokens(std::string_view text, const TokenCounter& counter) {
    return counter.count(text);
}

}  // namespace dualmem
