#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dualmem/backends.hpp"
#include "dualmem/index.hpp"
#include "dualmem/util.hpp"

using namespace dualmem;

namespace {

std::string random_words(std::uint64_t& rng, std::size_t n_words) {
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i) out += ' ';
        std::size_t len = 3 + bounded(rng, 8);
        for (std::size_t k = 0; k < len; ++k) out += static_cast<char>('a' + bounded(rng, 26));
    }
    return out;
}

std::vector<double> random_unit_vector(std::uint64_t& rng, std::size_t d) {
    std::vector<double> v(d);
    double norm2 = 0.0;
    for (auto& x : v) {
        x = unit_real(rng) * 2.0 - 1.0;
        norm2 += x * x;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

Chunk chunk_with_id(std::uint64_t id, std::string text = "chunk") {
    Chunk c;
    c.id = id;
    c.text = std::move(text);
    return c;
}

// Deliberately separate from ChunkIndex::retrieve_top_k: full sort over
// independently computed scores.
std::vector<std::pair<std::uint64_t, double>> brute_force_top_k(
    const std::vector<std::vector<double>>& vectors, const std::vector<double>& query, std::size_t k) {
    std::vector<std::pair<std::uint64_t, double>> scored;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        double dot = 0, na = 0, nb = 0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            dot += query[j] * vectors[i][j];
            na += query[j] * query[j];
            nb += vectors[i][j] * vectors[i][j];
        }
        double score = (na == 0 || nb == 0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
        scored.emplace_back(i, score);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    scored.resize(std::min(k, scored.size()));
    return scored;
}

}  // namespace

TEST(HashEmbedding, DeterministicAcrossCalls) {
    HashEmbeddingBackend backend;
    auto a = backend.embed("the significance threshold is p_threshold today");
    auto b = backend.embed("the significance threshold is p_threshold today");
    EXPECT_EQ(a, b);
}

TEST(HashEmbedding, UnitNorm) {
    HashEmbeddingBackend backend;
    std::uint64_t rng = 5;
    for (int i = 0; i < 50; ++i) {
        auto v = backend.embed(random_words(rng, 1 + bounded(rng, 30)));
        double norm2 = 0;
        for (double x : v) norm2 += x * x;
        EXPECT_NEAR(std::sqrt(norm2), 1.0, 1e-9);
    }
}

TEST(HashEmbedding, UnrelatedTextsAreDissimilar) {
    HashEmbeddingBackend backend;
    std::uint64_t rng = 6;
    for (int i = 0; i < 1000; ++i) {
        auto a = backend.embed(random_words(rng, 8));
        auto b = backend.embed(random_words(rng, 8));
        EXPECT_LT(std::abs(cosine_similarity(a, b)), 0.5) << "pair " << i;
    }
}

TEST(HashEmbedding, EmptyTextIsDeterministicUnitVector) {
    HashEmbeddingBackend backend;
    auto v = backend.embed("");
    EXPECT_DOUBLE_EQ(v[0], 1.0);
}

TEST(ChunkIndex, SelfSimilarityRanksFirstAtOne) {
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    const char* texts[] = {"alpha beta gamma measurements", "unrelated noise about the weather",
                           "significance threshold discussion p_threshold"};
    for (std::uint64_t i = 0; i < 3; ++i)
        index.add(chunk_with_id(i, texts[i]), backend.embed(texts[i]));
    auto top = index.retrieve_top_k(texts[2], backend, 5);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].chunk.id, 2u);
    EXPECT_NEAR(top[0].score, 1.0, 1e-9);
}

TEST(ChunkIndex, UnderFullIndexReturnsEverything) {
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    for (std::uint64_t i = 0; i < 3; ++i)
        index.add(chunk_with_id(i, "text " + std::to_string(i)), backend.embed("text " + std::to_string(i)));
    EXPECT_EQ(index.retrieve_top_k("query", backend, 5).size(), 3u);
}

TEST(ChunkIndex, EmptyIndexSignalsColdStore) {
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    EXPECT_TRUE(index.retrieve_top_k("anything", backend, 5).empty());
}

TEST(ChunkIndex, TieBreaksByAscendingChunkId) {
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    // Identical text => identical vectors => exact score ties.
    for (std::uint64_t id : {7u, 3u, 5u})
        index.add(chunk_with_id(id, "identical text"), backend.embed("identical text"));
    auto top = index.retrieve_top_k("identical text", backend, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].chunk.id, 3u);
    EXPECT_EQ(top[1].chunk.id, 5u);
    EXPECT_EQ(top[2].chunk.id, 7u);
}

TEST(ChunkIndex, MatchesBruteForceOracleOnRandomIndices) {
    std::uint64_t rng = 77;
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 1 + bounded(rng, 800);
        std::size_t d = 64;
        ChunkIndex index(d);
        std::vector<std::vector<double>> vectors;
        for (std::size_t i = 0; i < n; ++i) {
            vectors.push_back(random_unit_vector(rng, d));
            index.add(chunk_with_id(i), std::vector<double>(vectors.back()));
        }
        auto query = random_unit_vector(rng, d);
        auto got = index.retrieve_top_k(query, 5);
        auto expected = brute_force_top_k(vectors, query, 5);
        ASSERT_EQ(got.size(), expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].chunk.id, expected[i].first) << "trial " << trial << " rank " << i;
            EXPECT_DOUBLE_EQ(got[i].score, expected[i].second);
        }
    }
}

TEST(ChunkIndex, ScoresLieInRange) {
    std::uint64_t rng = 13;
    ChunkIndex index(16);
    for (std::size_t i = 0; i < 100; ++i) index.add(chunk_with_id(i), random_unit_vector(rng, 16));
    auto top = index.retrieve_top_k(random_unit_vector(rng, 16), 100);
    for (const auto& s : top) {
        EXPECT_GE(s.score, -1.0 - 1e-12);
        EXPECT_LE(s.score, 1.0 + 1e-12);
    }
}

TEST(ChunkIndex, IncrementalAppendEqualsBatchBuild) {
    HashEmbeddingBackend backend;
    std::uint64_t rng = 21;
    std::vector<Chunk> chunks;
    for (std::uint64_t i = 0; i < 60; ++i) chunks.push_back(chunk_with_id(i, random_words(rng, 20)));

    ChunkIndex batch = build_index(chunks, backend);
    ChunkIndex incremental(backend.dimension());
    for (const auto& c : chunks) incremental.add(c, backend.embed(c.text));

    std::string query = chunks[17].text;
    auto a = batch.retrieve_top_k(query, backend, 10);
    auto b = incremental.retrieve_top_k(query, backend, 10);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].chunk.id, b[i].chunk.id);
        EXPECT_DOUBLE_EQ(a[i].score, b[i].score);
    }
}

TEST(ChunkIndex, RejectsBadVectors) {
    ChunkIndex index(4);
    EXPECT_THROW(index.add(chunk_with_id(0), {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(index.add(chunk_with_id(0), {1.0, 2.0, std::nan(""), 0.0}), std::invalid_argument);
    EXPECT_THROW(ChunkIndex(0), ConfigError);
}

TEST(RagContext, TopChunksRideInTheProfileSlot) {
    TokenCounter counter;
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    index.add(chunk_with_id(0, "USER: the batch_size is FACT batch_size=0.128; fixed"),
              backend.embed("USER: the batch_size is FACT batch_size=0.128; fixed"));
    auto rag = rag_answer_context(index, "what is batch_size?", backend, counter, "PRE");
    EXPECT_EQ(rag.retrieved_ids.size(), 1u);
    EXPECT_TRUE(rag.context.episodic_messages.empty());
    EXPECT_NE(rag.context.profile_text.find("batch_size=0.128"), std::string::npos);
    std::string s = serialize_context(rag.context);
    EXPECT_NE(s.find("KNOWN FACTS:"), std::string::npos);
}

TEST(RagContext, EmptyIndexYieldsPreambleAndQueryOnly) {
    TokenCounter counter;
    HashEmbeddingBackend backend;
    ChunkIndex index(backend.dimension());
    auto rag = rag_answer_context(index, "anything?", backend, counter, "PRE");
    EXPECT_TRUE(rag.retrieved_ids.empty());
    EXPECT_EQ(serialize_context(rag.context), "PRE\nQUERY: anything?");
}

TEST(Cosine, DimensionMismatchThrows) {
    EXPECT_THROW(cosine_similarity({1.0}, {1.0, 2.0}), std::invalid_argument);
}
