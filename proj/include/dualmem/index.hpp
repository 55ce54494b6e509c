/*
 * In-memory vector index over embedded chunks with exact cosine top-k
 * retrieval. History sizes at desk scale make exhaustive scan sufficient;
 * no approximate structures.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/backends.hpp"
#include "dualmem/chunker.hpp"
#include "dualmem/context.hpp"

namespace dualmem {

inline constexpr std::size_t kDefaultTopK = 5;

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct ScoredChunk {
    Chunk chunk;
    double score = 0.0;
};

class ChunkIndex {
public:
    explicit ChunkIndex(std::size_t dimension)
        : dim_(dimension), mutex_(std::make_unique<std::shared_mutex>()) {
        if (dim_ == 0) throw ConfigError("ChunkIndex: dimension must be positive");
    }

    ChunkIndex(ChunkIndex&&) noexcept = default;
    ChunkIndex& operator=(ChunkIndex&&) noexcept = default;

    // Appends are serialized; readers are excluded only during the publish.
    void add(Chunk chunk, std::vector<double> embedding) {
        if (embedding.size() != dim_)
            throw std::invalid_argument("ChunkIndex: embedding dimension mismatch");
        for (double v : embedding)
            if (!std::isfinite(v)) throw std::invalid_argument("ChunkIndex: non-finite embedding value");
        std::unique_lock<std::shared_mutex> lock(*mutex_);
        chunks_.push_back(std::move(chunk));
        vectors_.push_back(std::move(embedding));
    }

    std::size_t size() const {
        std::shared_lock<std::shared_mutex> lock(*mutex_);
        return chunks_.size();
    }

    std::size_t dimension() const { return dim_; }

    std::vector<Chunk> chunks() const {
        std::shared_lock<std::shared_mutex> lock(*mutex_);
        return chunks_;
    }

    const std::vector<std::vector<double>>& vectors_unlocked() const { return vectors_; }

    // Exactly min(k, size) results by descending cosine similarity, ties
    // broken by ascending chunk id. An empty index yields an empty result
    // (cold store, not a failure).
    std::vector<ScoredChunk> retrieve_top_k(const std::vector<double>& query_embedding,
                                            std::size_t k = kDefaultTopK) const {
        std::shared_lock<std::shared_mutex> lock(*mutex_);
        std::vector<std::size_t> order(chunks_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<double> scores(chunks_.size());
        for (std::size_t i = 0; i < chunks_.size(); ++i)
            scores[i] = cosine_similarity(query_embedding, vectors_[i]);
        std::size_t take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (scores[a] != scores[b]) return scores[a] > scores[b];
                              return chunks_[a].id < chunks_[b].id;
                          });
        std::vector<ScoredChunk> out;
        out.reserve(take);
        for (std::size_t i = 0; i < take; ++i)
            out.push_back({chunks_[order[i]], scores[order[i]]});
        return out;
    }

    std::vector<ScoredChunk> retrieve_top_k(const std::string& query, const EmbeddingBackend& backend,
                                            std::size_t k = kDefaultTopK) const {
        return retrieve_top_k(backend.embed(query), k);
    }

private:
    std::size_t dim_;
    std::vector<Chunk> chunks_;
    std::vector<std::vector<double>> vectors_;
    mutable std::unique_ptr<std::shared_mutex> mutex_;
};

inline ChunkIndex build_index(const std::vector<Chunk>& chunks, const EmbeddingBackend& backend) {
    ChunkIndex index(backend.dimension());
    for (const auto& c : chunks) index.add(c, backend.embed(c.text));
    return index;
}

struct RagContext {
    AssembledContext context;
    std::vector<std::uint64_t> retrieved_ids;  // descending similarity order
    std::vector<double> scores;
};

// Standard retrieval-augmented context: preamble, top-k chunks by
// descending similarity, query. No episodic window, no recency signal;
// retrieved text rides in the profile slot of the shared contract.
inline RagContext rag_answer_context(const ChunkIndex& index, const std::string& query,
                                     const EmbeddingBackend& backend, const TokenCounter& counter,
                                     const std::string& system_preamble = {},
                                     std::size_t k = kDefaultTopK) {
    RagContext out;
    auto top = index.retrieve_top_k(query, backend, k);
    std::string block;
    for (std::size_t i = 0; i < top.size(); ++i) {
        if (i) block += "\n";
        block += top[i].chunk.text;
        out.retrieved_ids.push_back(top[i].chunk.id);
        out.scores.push_back(top[i].score);
    }
    out.context = assemble_context(block, {}, query, counter, system_preamble);
    return out;
}

}  // namespace dualmem
