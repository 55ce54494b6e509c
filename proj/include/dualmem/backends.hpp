/*
 * Pluggable chat-completion, embedding and judge backends.
 *
 * Scripted implementations are pure functions of their inputs: the echo
 * backend answers a probe correctly iff the probed fact marker appears in
 * the provided context, which isolates memory-architecture effects from
 * model capability. Latency for scripted calls is simulated with an affine
 * model of input size and is labeled as simulated in reports.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dualmem/context.hpp"
#include "dualmem/facts.hpp"
#include "dualmem/tokens.hpp"
#include "dualmem/util.hpp"

namespace dualmem {

enum class BackendKind { scripted, http_openai_compatible };

struct ChatBackendSpec {
    BackendKind kind = BackendKind::scripted;
    std::string model = "scripted-echo";
    double temperature = 0.7;                    // scripted kind ignores this
    std::size_t max_output_tokens = 512;
    std::chrono::milliseconds timeout{30000};
    std::size_t context_limit = 128000;          // hard model limit
    std::string endpoint;                        // http kind only
    std::string api_key_env = "DUALMEM_API_KEY"; // bearer credential source

    void validate() const {
        if (temperature < 0.0 || temperature > 2.0)
            throw ConfigError("ChatBackendSpec: temperature must be in [0, 2]");
        if (kind == BackendKind::http_openai_compatible && endpoint.empty())
            throw ConfigError("ChatBackendSpec: http backend requires an endpoint");
    }
};

struct CallRecord {
    enum class Outcome { ok, overflow, error };
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    std::chrono::milliseconds wall_latency{0};
    Outcome outcome = Outcome::ok;
};

inline std::string_view outcome_label(CallRecord::Outcome o) {
    switch (o) {
        case CallRecord::Outcome::ok: return "ok";
        case CallRecord::Outcome::overflow: return "overflow";
        case CallRecord::Outcome::error: return "error";
    }
    return "ok";
}

inline CallRecord::Outcome outcome_from_label(std::string_view s) {
    if (s == "ok") return CallRecord::Outcome::ok;
    if (s == "overflow") return CallRecord::Outcome::overflow;
    if (s == "error") return CallRecord::Outcome::error;
    throw std::invalid_argument("unknown outcome label: " + std::string(s));
}

struct ChatResult {
    std::string text;
    CallRecord record;
};

// latency = base + per_token * input_tokens. Defaults are fitted so a
// 180-token context reports ~600ms and a 120k-token context ~10s.
struct LatencyModel {
    double base_ms = 585.0;
    double per_token_ms = 0.0785;

    std::chrono::milliseconds simulate(std::size_t input_tokens) const {
        return std::chrono::milliseconds(
            static_cast<std::int64_t>(std::llround(base_ms + per_token_ms * static_cast<double>(input_tokens))));
    }
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResult complete(const std::string& prompt) = 0;
    virtual const ChatBackendSpec& spec() const = 0;
};

// Serializes the assembled context and forwards it to the backend.
inline ChatResult chat_complete(ChatBackend& backend, const AssembledContext& ctx) {
    return backend.complete(serialize_context(ctx));
}

// Up to `retries` extra attempts on error outcomes; every attempt's record
// is appended to `attempts` so no call goes unaccounted.
inline ChatResult complete_with_retry(ChatBackend& backend, const std::string& prompt,
                                      std::vector<CallRecord>* attempts = nullptr,
                                      unsigned retries = 2) {
    ChatResult result;
    for (unsigned attempt = 0; attempt <= retries; ++attempt) {
        result = backend.complete(prompt);
        if (attempts) attempts->push_back(result.record);
        if (result.record.outcome != CallRecord::Outcome::error) break;
    }
    return result;
}

enum class ScriptedAnswerRule { echo_fact_if_present, fixed_response, fail_with_error };

struct ScriptedBehavior {
    ScriptedAnswerRule rule = ScriptedAnswerRule::echo_fact_if_present;
    std::string fixed_response;
};

namespace detail {

// Keys present in the query text, ordered by first query position.
inline std::vector<std::string> queried_keys(const std::vector<FactAssertion>& facts,
                                             const std::string& query) {
    std::vector<std::pair<std::size_t, std::string>> hits;
    for (const auto& f : facts) {
        if (std::find_if(hits.begin(), hits.end(), [&](const auto& h) { return h.second == f.key; }) !=
            hits.end())
            continue;
        std::size_t at = query.find(f.key);
        if (at != std::string::npos) hits.emplace_back(at, f.key);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::string> keys;
    keys.reserve(hits.size());
    for (auto& h : hits) keys.push_back(std::move(h.second));
    return keys;
}

}  // namespace detail

// Deterministic stand-in for a chat model. The echo rule extracts every
// "FACT key=value" marker from the context, matches keys mentioned in the
// QUERY line, and answers with the last value seen per key plus the full
// value sequence in context order. Facts outside the provided context are
// unanswerable by construction.
class ScriptedChatBackend final : public ChatBackend {
public:
    explicit ScriptedChatBackend(ScriptedBehavior behavior = {}, ChatBackendSpec spec = {},
                                 LatencyModel latency = {}, TokenCounter counter = {})
        : behavior_(behavior), spec_(std::move(spec)), latency_(latency), counter_(counter) {
        spec_.kind = BackendKind::scripted;
    }

    ChatResult complete(const std::string& prompt) override {
        ChatResult result;
        result.record.input_tokens = counter_.count(prompt);
        result.record.wall_latency = latency_.simulate(result.record.input_tokens);
        if (result.record.input_tokens > spec_.context_limit) {
            result.record.outcome = CallRecord::Outcome::overflow;
            return result;
        }
        switch (behavior_.rule) {
            case ScriptedAnswerRule::fail_with_error:
                result.record.outcome = CallRecord::Outcome::error;
                return result;
            case ScriptedAnswerRule::fixed_response:
                result.text = behavior_.fixed_response;
                break;
            case ScriptedAnswerRule::echo_fact_if_present:
                result.text = echo_answer(prompt);
                break;
        }
        result.record.output_tokens = counter_.count(result.text);
        return result;
    }

    const ChatBackendSpec& spec() const override { return spec_; }

private:
    std::string echo_answer(const std::string& prompt) const {
        std::size_t qpos = prompt.rfind(std::string("\n") + kQueryLabel);
        std::string query = qpos == std::string::npos
                                ? (prompt.rfind(kQueryLabel, 0) == 0 ? prompt.substr(std::string(kQueryLabel).size()) : std::string())
                                : prompt.substr(qpos + 1 + std::string(kQueryLabel).size());
        std::string context = qpos == std::string::npos ? prompt : prompt.substr(0, qpos);

        auto facts = scan_facts(context);
        auto keys = detail::queried_keys(facts, query);
        if (keys.empty()) return "UNKNOWN";

        std::string leads;
        std::string detail_part;
        for (const auto& key : keys) {
            std::vector<std::string> values;
            for (const auto& f : facts) {
                if (f.key != key) continue;
                if (std::find(values.begin(), values.end(), f.value) == values.end())
                    values.push_back(f.value);
            }
            std::string last;
            for (const auto& f : facts)
                if (f.key == key) last = f.value;
            if (!leads.empty()) leads += "; ";
            leads += last;
            if (!detail_part.empty()) detail_part += " | ";
            detail_part += key;
            detail_part += ": ";
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) detail_part += ", ";
                detail_part += values[i];
            }
        }
        return leads + " (" + detail_part + ")";
    }

    ScriptedBehavior behavior_;
    ChatBackendSpec spec_;
    LatencyModel latency_;
    TokenCounter counter_;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
};

// Seeded hash embedding: each word maps to a fixed Gaussian direction and
// the text vector is the weighted sum, L2-normalized. Weights grow
// quadratically with word length, so long distinctive identifiers dominate
// over filler words and texts sharing them land close in cosine space.
// Cross-term noise between unrelated words scales as 1/sqrt(d); the 512
// default keeps it well below the shared-word signal at realistic chunk
// counts. The dimension stays configurable for live backends.
class HashEmbeddingBackend final : public EmbeddingBackend {
public:
    explicit HashEmbeddingBackend(std::size_t dimension = 512, std::uint64_t seed = 0x5eedf00d)
        : dim_(dimension), seed_(seed) {}

    std::vector<double> embed(std::string_view text) const override {
        std::vector<double> acc(dim_, 0.0);
        bool any = false;
        std::string norm = lowercase(collapse_whitespace(text));
        std::size_t i = 0;
        while (i < norm.size()) {
            while (i < norm.size() && !is_word_char(norm[i])) ++i;
            std::size_t j = i;
            while (j < norm.size() && is_word_char(norm[j])) ++j;
            if (j > i) {
                std::string_view word(norm.data() + i, j - i);
                while (!word.empty() && word.back() == '.') word.remove_suffix(1);
                if (!word.empty()) {
                    double w = word.size() >= 4
                                   ? static_cast<double>(word.size()) * static_cast<double>(word.size())
                                   : 0.2;
                    const std::vector<double>& dir = word_direction(word);
                    for (std::size_t k = 0; k < dim_; ++k) acc[k] += w * dir[k];
                    any = true;
                }
            }
            i = j;
        }
        if (!any) {
            acc.assign(dim_, 0.0);
            acc[0] = 1.0;
            return acc;
        }
        double norm2 = 0.0;
        for (double v : acc) norm2 += v * v;
        double inv = 1.0 / std::sqrt(norm2);
        for (double& v : acc) v *= inv;
        return acc;
    }

    std::size_t dimension() const override { return dim_; }

private:
    static bool is_word_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-' ||
               c == '+';
    }

    const std::vector<double>& word_direction(std::string_view word) const {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(std::string(word));
        if (it != cache_.end()) return it->second;
        std::vector<double> dir(dim_);
        std::uint64_t state = fnv1a64(word) ^ seed_;
        for (std::size_t k = 0; k < dim_; k += 2) {
            // Box-Muller over the splitmix64 stream: portable, no
            // dependence on library distribution internals.
            double u1 = std::max(unit_real(state), 1e-12);
            double u2 = unit_real(state);
            double r = std::sqrt(-2.0 * std::log(u1));
            dir[k] = r * std::cos(2.0 * M_PI * u2);
            if (k + 1 < dim_) dir[k + 1] = r * std::sin(2.0 * M_PI * u2);
        }
        return cache_.emplace(std::string(word), std::move(dir)).first->second;
    }

    std::size_t dim_;
    std::uint64_t seed_;
    mutable std::unordered_map<std::string, std::vector<double>> cache_;
    mutable std::mutex cache_mutex_;
};

class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual std::string evaluate(const std::string& question, const std::string& ground_truth,
                                 const std::string& answer) = 0;
};

// Stub rubric: exact normalized match scores 10, containment 8, anything
// else 2; an empty answer scores 0.
class ScriptedJudge final : public JudgeBackend {
public:
    std::string evaluate(const std::string&, const std::string& ground_truth,
                         const std::string& answer) override {
        auto norm = [](const std::string& s) {
            std::string c = lowercase(collapse_whitespace(s));
            std::size_t a = c.find_first_not_of(' ');
            std::size_t b = c.find_last_not_of(' ');
            return a == std::string::npos ? std::string() : c.substr(a, b - a + 1);
        };
        std::string t = norm(ground_truth);
        std::string a = norm(answer);
        if (a.empty()) return "Score: 0";
        if (a == t) return "Score: 10";
        if (a.find(t) != std::string::npos) return "Score: 8";
        return "Score: 2";
    }
};

// Parses the numeric score from judge output. A parse failure is an error,
// never a default score.
inline double judge_score(JudgeBackend& judge, const std::string& question,
                          const std::string& ground_truth, const std::string& answer) {
    std::string out = judge.evaluate(question, ground_truth, answer);
    std::size_t i = 0;
    while (i < out.size() && !(out[i] >= '0' && out[i] <= '9')) ++i;
    if (i == out.size()) throw BackendError("judge_score: no numeric score in judge output: " + out);
    std::size_t end = i;
    while (end < out.size() && ((out[end] >= '0' && out[end] <= '9') || out[end] == '.')) ++end;
    double score = std::stod(out.substr(i, end - i));
    if (score < 0.0 || score > 10.0)
        throw BackendError("judge_score: score out of [0,10]: " + out.substr(i, end - i));
    return score;
}

}  // namespace dualmem
