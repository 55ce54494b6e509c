/*
 * Fact marker grammar shared by the synthetic generators, the rule-based
 * consolidator and the scripted chat backend.
 *
 * A marker is the literal text "FACT <key>=<value>" embedded in a carrier
 * sentence. Keys are [A-Za-z_][A-Za-z0-9_]*; values run to the first ';',
 * newline or end of text and are right-trimmed.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dualmem/util.hpp"

namespace dualmem {

struct FactAssertion {
    std::string key;
    std::string value;
};

inline bool is_key_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

inline bool is_key_char(char c) {
    return is_key_start(c) || (c >= '0' && c <= '9');
}

inline std::string render_fact_marker(std::string_view key, std::string_view value) {
    std::string out = "FACT ";
    out += key;
    out += '=';
    out += value;
    return out;
}

// All markers in document order. Malformed candidates are skipped.
inline std::vector<FactAssertion> scan_facts(std::string_view text) {
    std::vector<FactAssertion> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t at = text.find("FACT ", pos);
        if (at == std::string_view::npos) break;
        // Require a token boundary before the marker keyword.
        if (at > 0 && (is_key_char(text[at - 1]) || text[at - 1] == '=')) {
            pos = at + 5;
            continue;
        }
        std::size_t k = at + 5;
        std::size_t kend = k;
        if (kend < text.size() && is_key_start(text[kend])) {
            ++kend;
            while (kend < text.size() && is_key_char(text[kend])) ++kend;
        }
        if (kend == k || kend >= text.size() || text[kend] != '=') {
            pos = at + 5;
            continue;
        }
        std::size_t v = kend + 1;
        std::size_t vend = v;
        while (vend < text.size() && text[vend] != ';' && text[vend] != '\n') ++vend;
        std::size_t vtrim = vend;
        while (vtrim > v && is_space_byte(static_cast<unsigned char>(text[vtrim - 1]))) --vtrim;
        if (vtrim > v) {
            out.push_back({std::string(text.substr(k, kend - k)),
                           std::string(text.substr(v, vtrim - v))});
        }
        pos = vend;
    }
    return out;
}

// Last asserted value per key, document order; empty when absent.
inline std::string last_fact_value(std::string_view text, std::string_view key) {
    std::string value;
    for (const auto& f : scan_facts(text))
        if (f.key == key) value = f.value;
    return value;
}

}  // namespace dualmem
