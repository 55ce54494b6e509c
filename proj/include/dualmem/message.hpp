/*
 * Conversational turn unit plus the fixed role-labeled serialization used
 * for context assembly, chunking and persistence.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualmem/tokens.hpp"

namespace dualmem {

enum class Role { user, agent, system };

inline std::string_view role_label(Role r) {
    switch (r) {
        case Role::user: return "USER";
        case Role::agent: return "AGENT";
        case Role::system: return "SYSTEM";
    }
    return "USER";
}

inline Role role_from_label(std::string_view s) {
    if (s == "USER" || s == "user") return Role::user;
    if (s == "AGENT" || s == "agent") return Role::agent;
    if (s == "SYSTEM" || s == "system") return Role::system;
    throw std::invalid_argument("unknown role label: " + std::string(s));
}

struct Message {
    Role role = Role::user;
    std::string text;
    std::uint64_t index = 0;       // 0-based, contiguous within a conversation
    std::size_t token_count = 0;   // computed once at ingestion
};

inline Message make_message(Role role, std::string text, std::uint64_t index,
                            const TokenCounter& counter) {
    Message m;
    m.role = role;
    m.token_count = counter.count(text);
    m.text = std::move(text);
    m.index = index;
    return m;
}

// One message, one line: "USER: ..." / "AGENT: ...".
inline std::string serialize_message(const Message& m) {
    std::string out;
    out.reserve(m.text.size() + 8);
    out += role_label(m.role);
    out += ": ";
    out += m.text;
    return out;
}

inline std::string serialize_history(const std::vector<Message>& messages) {
    std::string out;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (i) out += '\n';
        out += serialize_message(messages[i]);
    }
    return out;
}

// Line-delimited persistence record: {index, role, text, token_count}.
inline nlohmann::ordered_json message_to_json(const Message& m) {
    return nlohmann::ordered_json{{"index", m.index},
                                  {"role", std::string(role_label(m.role))},
                                  {"text", m.text},
                                  {"token_count", m.token_count}};
}

inline Message message_from_json(const nlohmann::json& j) {
    Message m;
    m.index = j.at("index").get<std::uint64_t>();
    m.role = role_from_label(j.at("role").get<std::string>());
    m.text = j.at("text").get<std::string>();
    m.token_count = j.at("token_count").get<std::size_t>();
    return m;
}

}  // namespace dualmem
