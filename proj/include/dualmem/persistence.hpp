/*
 * Durable text-based storage. Every object persists as line-delimited JSON
 * under {kind}/{spec-hash}/{seed}.ldj with an embedded provenance header
 * and a content hash; loads verify the hash and fail loudly on corruption.
 * Writes are atomic (write-temp-then-rename).
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualmem/chunker.hpp"
#include "dualmem/evaluation.hpp"
#include "dualmem/index.hpp"
#include "dualmem/message.hpp"
#include "dualmem/profile.hpp"
#include "dualmem/util.hpp"

namespace dualmem {

struct Provenance {
    std::string kind;
    std::string spec_hash;
    std::uint64_t seed = 0;
};

struct StoreLayout {
    std::filesystem::path root;

    static constexpr const char* kSubStores[] = {"conversations", "profiles", "indices", "fixtures",
                                                 "results"};

    void ensure() const {
        for (const char* sub : kSubStores) std::filesystem::create_directories(root / sub);
    }

    std::filesystem::path object_path(const std::string& kind, const std::string& spec_hash,
                                      std::uint64_t seed) const {
        return root / kind / spec_hash / (std::to_string(seed) + ".ldj");
    }
};

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_atomic: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write_atomic: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace detail {

inline void save_ldj(const std::filesystem::path& path, const Provenance& prov,
                     const std::vector<std::string>& lines) {
    std::string payload;
    for (const auto& line : lines) {
        payload += line;
        payload += '\n';
    }
    nlohmann::ordered_json header{{"kind", prov.kind},
                                  {"spec_hash", prov.spec_hash},
                                  {"seed", prov.seed},
                                  {"content_hash", to_hex(fnv1a64(payload))}};
    write_atomic(path, header.dump() + "\n" + payload);
}

inline std::pair<Provenance, std::vector<std::string>> load_ldj(const std::filesystem::path& path,
                                                                const std::string& expected_kind) {
    std::string content = read_file(path);
    std::size_t nl = content.find('\n');
    if (nl == std::string::npos) throw CorruptionError("load_ldj: missing header line in " + path.string());
    nlohmann::json header = nlohmann::json::parse(content.substr(0, nl));
    std::string payload = content.substr(nl + 1);
    if (to_hex(fnv1a64(payload)) != header.at("content_hash").get<std::string>())
        throw CorruptionError("load_ldj: content hash mismatch in " + path.string());
    Provenance prov;
    prov.kind = header.at("kind").get<std::string>();
    prov.spec_hash = header.at("spec_hash").get<std::string>();
    prov.seed = header.at("seed").get<std::uint64_t>();
    if (!expected_kind.empty() && prov.kind != expected_kind)
        throw CorruptionError("load_ldj: expected kind " + expected_kind + ", found " + prov.kind);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < payload.size()) {
        std::size_t end = payload.find('\n', pos);
        if (end == std::string::npos) end = payload.size();
        lines.push_back(payload.substr(pos, end - pos));
        pos = end + 1;
    }
    return {prov, lines};
}

// Forward-compat: unknown fields are ignored, with one warning per field.
inline void note_unknown_fields(const nlohmann::json& j, std::initializer_list<const char*> known,
                                std::vector<std::string>* warnings) {
    if (!warnings) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (const char* k : known)
            if (it.key() == k) {
                found = true;
                break;
            }
        if (!found) warnings->push_back("ignored unknown field: " + it.key());
    }
}

}  // namespace detail

inline void save_messages(const std::filesystem::path& path, const std::vector<Message>& messages,
                          const Provenance& prov) {
    std::vector<std::string> lines;
    lines.reserve(messages.size());
    for (const auto& m : messages) lines.push_back(message_to_json(m).dump());
    detail::save_ldj(path, {"conversations", prov.spec_hash, prov.seed}, lines);
}

inline std::vector<Message> load_messages(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings = nullptr) {
    auto [prov, lines] = detail::load_ldj(path, "conversations");
    std::vector<Message> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        nlohmann::json j = nlohmann::json::parse(line);
        detail::note_unknown_fields(j, {"index", "role", "text", "token_count"}, warnings);
        out.push_back(message_from_json(j));
    }
    return out;
}

// Full profile version history is retained for audit.
inline void save_profile_history(const std::filesystem::path& path,
                                 const std::vector<SemanticProfile>& history, const Provenance& prov) {
    std::vector<std::string> lines;
    lines.reserve(history.size());
    for (const auto& p : history) {
        lines.push_back(nlohmann::ordered_json{{"version", p.version},
                                               {"last_consolidated_index", p.last_consolidated_index},
                                               {"token_count", p.token_count},
                                               {"text", p.text}}
                            .dump());
    }
    detail::save_ldj(path, {"profiles", prov.spec_hash, prov.seed}, lines);
}

inline std::vector<SemanticProfile> load_profile_history(const std::filesystem::path& path,
                                                         std::vector<std::string>* warnings = nullptr) {
    auto [prov, lines] = detail::load_ldj(path, "profiles");
    std::vector<SemanticProfile> out;
    for (const auto& line : lines) {
        nlohmann::json j = nlohmann::json::parse(line);
        detail::note_unknown_fields(j, {"version", "last_consolidated_index", "token_count", "text"},
                                    warnings);
        SemanticProfile p;
        p.version = j.at("version").get<std::uint64_t>();
        p.last_consolidated_index = j.at("last_consolidated_index").get<std::int64_t>();
        p.token_count = j.at("token_count").get<std::size_t>();
        p.text = j.at("text").get<std::string>();
        out.push_back(std::move(p));
    }
    return out;
}

// One record per chunk with its embedding as decimal floats; vectors
// round-trip to full precision.
inline void save_chunk_index(const std::filesystem::path& path, const ChunkIndex& index,
                             const Provenance& prov) {
    std::vector<std::string> lines;
    auto chunks = index.chunks();
    const auto& vectors = index.vectors_unlocked();
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        nlohmann::ordered_json j{{"id", chunks[i].id},
                                 {"first_message_index", chunks[i].first_message_index},
                                 {"last_message_index", chunks[i].last_message_index},
                                 {"begin_cp", chunks[i].begin_cp},
                                 {"end_cp", chunks[i].end_cp},
                                 {"token_count", chunks[i].token_count},
                                 {"text", chunks[i].text},
                                 {"d", index.dimension()},
                                 {"vector", vectors[i]}};
        lines.push_back(j.dump());
    }
    detail::save_ldj(path, {"indices", prov.spec_hash, prov.seed}, lines);
}

inline ChunkIndex load_chunk_index(const std::filesystem::path& path,
                                   std::vector<std::string>* warnings = nullptr) {
    auto [prov, lines] = detail::load_ldj(path, "indices");
    std::size_t dim = 0;
    std::vector<std::pair<Chunk, std::vector<double>>> entries;
    for (const auto& line : lines) {
        nlohmann::json j = nlohmann::json::parse(line);
        detail::note_unknown_fields(j,
                                    {"id", "first_message_index", "last_message_index", "begin_cp",
                                     "end_cp", "token_count", "text", "d", "vector"},
                                    warnings);
        Chunk c;
        c.id = j.at("id").get<std::uint64_t>();
        c.first_message_index = j.at("first_message_index").get<std::uint64_t>();
        c.last_message_index = j.at("last_message_index").get<std::uint64_t>();
        c.begin_cp = j.at("begin_cp").get<std::size_t>();
        c.end_cp = j.at("end_cp").get<std::size_t>();
        c.token_count = j.at("token_count").get<std::size_t>();
        c.text = j.at("text").get<std::string>();
        dim = j.at("d").get<std::size_t>();
        entries.emplace_back(std::move(c), j.at("vector").get<std::vector<double>>());
    }
    ChunkIndex index(dim == 0 ? 1 : dim);
    for (auto& [c, v] : entries) index.add(std::move(c), std::move(v));
    return index;
}

inline void save_records(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records,
                         const Provenance& prov) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(record_to_json(r).dump());
    detail::save_ldj(path, {"results", prov.spec_hash, prov.seed}, lines);
}

inline std::vector<BenchmarkRecord> load_records(const std::filesystem::path& path,
                                                 std::vector<std::string>* warnings = nullptr) {
    auto [prov, lines] = detail::load_ldj(path, "results");
    std::vector<BenchmarkRecord> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        nlohmann::json j = nlohmann::json::parse(line);
        detail::note_unknown_fields(
            j,
            {"architecture", "scale", "seed", "query_type", "expected", "actual", "matched",
             "latency_ms", "input_tokens", "output_tokens", "outcome", "model", "cost"},
            warnings);
        out.push_back(record_from_json(j));
    }
    return out;
}

}  // namespace dualmem
