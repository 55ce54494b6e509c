/*
 * Context assembly contract shared by all three architectures. Parts are
 * serialized in a fixed order (preamble, profile under a KNOWN FACTS
 * header, episodic messages oldest first, query) so token accounting is
 * reproducible.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/message.hpp"
#include "dualmem/tokens.hpp"

namespace dualmem {

inline constexpr const char* kKnownFactsHeader = "KNOWN FACTS:";
inline constexpr const char* kQueryLabel = "QUERY: ";

struct AssembledContext {
    std::string system_preamble;
    std::string profile_text;               // may be empty
    std::vector<Message> episodic_messages; // conversation order
    std::string query;
    std::size_t total_tokens = 0;           // sum over serialized parts
};

inline std::string profile_block(const std::string& profile_text) {
    std::string out = kKnownFactsHeader;
    out += '\n';
    out += profile_text;
    return out;
}

inline std::string query_line(const std::string& query) {
    return std::string(kQueryLabel) + query;
}

// Pure function of its inputs: same inputs give byte-identical output.
inline AssembledContext assemble_context(const std::string& profile_text,
                                         const std::vector<Message>& window,
                                         const std::string& query,
                                         const TokenCounter& counter,
                                         const std::string& system_preamble = {}) {
    if (query.empty()) throw std::invalid_argument("assemble_context: empty query");
    AssembledContext ctx;
    ctx.system_preamble = system_preamble;
    ctx.profile_text = profile_text;
    ctx.episodic_messages = window;
    ctx.query = query;

    std::size_t total = 0;
    if (!system_preamble.empty()) total += counter.count(system_preamble);
    if (!profile_text.empty()) total += counter.count(profile_block(profile_text));
    for (const auto& m : window) total += counter.count(serialize_message(m));
    total += counter.count(query_line(query));
    ctx.total_tokens = total;
    return ctx;
}

// Parts joined by single newlines; empty parts are omitted entirely.
inline std::string serialize_context(const AssembledContext& ctx) {
    std::string out;
    auto push = [&out](const std::string& part) {
        if (part.empty()) return;
        if (!out.empty()) out += '\n';
        out += part;
    };
    push(ctx.system_preamble);
    if (!ctx.profile_text.empty()) push(profile_block(ctx.profile_text));
    for (const auto& m : ctx.episodic_messages) push(serialize_message(m));
    push(query_line(ctx.query));
    return out;
}

}  // namespace dualmem
