/*
 * Token-aware recursive chunking of serialized conversation history.
 *
 * Chunk arithmetic runs on exact codepoint spans at the heuristic rate of
 * 4 characters per token: a 500-token chunk is a 2000-codepoint span and
 * the 50-token overlap is exactly 200 codepoints. Cut points prefer, in
 * order: message boundary, paragraph break, sentence end, whitespace, hard
 * cut. De-overlapped concatenation reproduces the source byte-exactly.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/message.hpp"
#include "dualmem/tokens.hpp"
#include "dualmem/util.hpp"

namespace dualmem {

struct Chunk {
    std::uint64_t id = 0;
    std::string text;
    std::uint64_t first_message_index = 0;
    std::uint64_t last_message_index = 0;
    std::size_t token_count = 0;
    // Codepoint span within the serialized source; overlap checks and
    // byte-exact reconstruction are defined on these.
    std::size_t begin_cp = 0;
    std::size_t end_cp = 0;
};

struct ChunkerParams {
    std::size_t chunk_tokens = 500;
    std::size_t overlap_tokens = 50;
    std::size_t chars_per_token = 4;
    // How far back from the hard limit a natural boundary may pull the cut.
    std::size_t lookback_tokens = 100;
};

namespace detail {

enum class CutKind : int { none = 0, whitespace = 1, sentence = 2, paragraph = 3, message = 4 };

}  // namespace detail

inline std::vector<Chunk> chunk_history(const std::vector<Message>& messages,
                                        const ChunkerParams& params = {},
                                        const TokenCounter& counter = {}) {
    if (params.chunk_tokens <= params.overlap_tokens)
        throw ConfigError("chunk_history: chunk size must exceed overlap");
    std::vector<Chunk> chunks;
    if (messages.empty()) return chunks;

    std::string source = serialize_history(messages);

    // Codepoint -> byte offsets, plus per-codepoint cut preference. A cut at
    // codepoint p means "chunk ends before p".
    std::vector<std::size_t> cp_byte;
    cp_byte.reserve(source.size() + 1);
    for (std::size_t i = 0; i < source.size(); ++i)
        if ((static_cast<unsigned char>(source[i]) & 0xC0) != 0x80) cp_byte.push_back(i);
    cp_byte.push_back(source.size());
    const std::size_t total_cp = cp_byte.size() - 1;

    // Message start positions (codepoints) for span attribution. Messages
    // serialize one per line, so every line start is a message boundary.
    std::vector<std::size_t> msg_start_cp;
    msg_start_cp.reserve(messages.size());
    {
        std::size_t cp = 0;
        msg_start_cp.push_back(0);
        for (std::size_t i = 0; i < source.size(); ++i) {
            if ((static_cast<unsigned char>(source[i]) & 0xC0) != 0x80) ++cp;
            if (source[i] == '\n') msg_start_cp.push_back(cp);
        }
    }

    auto cut_kind = [&](std::size_t cp) -> detail::CutKind {
        if (cp == 0 || cp >= total_cp) return detail::CutKind::none;
        char prev = source[cp_byte[cp - 1]];
        char here = source[cp_byte[cp]];
        if (prev == '\n') return detail::CutKind::message;
        if (here == '\n' && prev != '\n') return detail::CutKind::none;  // prefer cutting after the newline
        if (prev == ' ' && cp >= 2 && source[cp_byte[cp - 2]] == '.') return detail::CutKind::sentence;
        if (is_space_byte(static_cast<unsigned char>(prev))) return detail::CutKind::whitespace;
        return detail::CutKind::none;
    };

    const std::size_t max_span = params.chunk_tokens * params.chars_per_token;
    const std::size_t overlap_span = params.overlap_tokens * params.chars_per_token;
    const std::size_t lookback = params.lookback_tokens * params.chars_per_token;

    std::size_t start = 0;
    std::uint64_t id = 0;
    while (true) {
        std::size_t end;
        if (total_cp - start <= max_span) {
            end = total_cp;
        } else {
            std::size_t hard = start + max_span;
            std::size_t floor_cp = hard > lookback ? hard - lookback : 0;
            if (floor_cp <= start + overlap_span) floor_cp = start + overlap_span + 1;
            end = hard;
            detail::CutKind best = detail::CutKind::none;
            for (std::size_t p = hard; p > floor_cp; --p) {
                detail::CutKind k = cut_kind(p);
                if (static_cast<int>(k) > static_cast<int>(best)) {
                    best = k;
                    end = p;
                    if (k == detail::CutKind::message) break;  // highest preference, rightmost wins
                }
            }
            if (best == detail::CutKind::none) end = hard;
        }

        Chunk c;
        c.id = id++;
        c.begin_cp = start;
        c.end_cp = end;
        c.text = source.substr(cp_byte[start], cp_byte[end] - cp_byte[start]);
        c.token_count = counter.count(c.text);
        // Attribute the span to source messages.
        std::size_t first_msg = 0;
        while (first_msg + 1 < msg_start_cp.size() && msg_start_cp[first_msg + 1] <= start) ++first_msg;
        std::size_t last_msg = first_msg;
        while (last_msg + 1 < msg_start_cp.size() && msg_start_cp[last_msg + 1] < end) ++last_msg;
        c.first_message_index = messages[first_msg].index;
        c.last_message_index = messages[last_msg].index;
        chunks.push_back(std::move(c));

        if (end == total_cp) break;
        start = end - overlap_span;
    }
    return chunks;
}

// Reassembles the serialized source from chunks by dropping each successor's
// leading overlap. Inverse of chunk_history by construction.
inline std::string reconstruct_history(const std::vector<Chunk>& chunks) {
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i == 0) {
            out += chunks[i].text;
            continue;
        }
        std::size_t skip_cp = chunks[i - 1].end_cp - chunks[i].begin_cp;
        out += chunks[i].text.substr(codepoint_to_byte(chunks[i].text, skip_cp));
    }
    return out;
}

}  // namespace dualmem
