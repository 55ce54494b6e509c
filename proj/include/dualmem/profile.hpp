/*
 * Neocortical memory: the consolidated profile and the three-stage pipeline
 * that updates it (extraction, temporal-precedence conflict resolution,
 * incremental replacement).
 *
 * Consolidation failures never corrupt the inference path: the prior
 * profile is retained and the failure is reported out-of-band.
 */
#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dualmem/backends.hpp"
#include "dualmem/context.hpp"
#include "dualmem/episodic.hpp"
#include "dualmem/facts.hpp"
#include "dualmem/message.hpp"

namespace dualmem {

struct SemanticProfile {
    std::string text;
    std::uint64_t version = 0;
    std::size_t token_count = 0;
    std::int64_t last_consolidated_index = -1;  // newest message incorporated
};

// Approaching the hard context limit is flagged, never enforced.
inline constexpr std::size_t kProfileWarnTokens = 120000;

inline bool profile_near_limit(const SemanticProfile& p, std::size_t warn_tokens = kProfileWarnTokens) {
    return p.token_count >= warn_tokens;
}

enum class ConflictRule { temporal_precedence };

struct ConsolidationPolicy {
    std::uint32_t cadence = 10;  // 1 = every exchange (production), 10 = evaluation mode
    double consolidator_temperature = 0.0;
    ConflictRule conflict_rule = ConflictRule::temporal_precedence;
    unsigned max_retries = 2;

    void validate() const {
        if (cadence < 1) throw ConfigError("ConsolidationPolicy: cadence must be >= 1");
    }
};

inline constexpr const char* kConsolidationInstructions =
    "You are maintaining a scientific research profile.\n"
    "Extract:\n"
    "- Project goals and hypotheses\n"
    "- Analysis parameters (thresholds, cutoffs)\n"
    "- Dataset specifications\n"
    "- Preferences (visualization, methods)\n"
    "\n"
    "If the new message contradicts existing facts,\n"
    "UPDATE the profile with the most recent value.\n"
    "Preserve technical precision.";

inline constexpr const char* kEmptyProfilePlaceholder = "No facts recorded yet.";

inline constexpr const char* kExistingProfileHeader = "EXISTING PROFILE:";
inline constexpr const char* kRecentMessagesHeader = "RECENT MESSAGES:";
inline constexpr const char* kLatestExchangeHeader = "LATEST EXCHANGE:";

struct ConsolidationRequest {
    std::vector<Message> episodic_snapshot;       // current window, oldest first
    SemanticProfile prior_profile;
    std::pair<Message, Message> latest_exchange;  // the two highest indices in scope
    std::string prompt_template = kConsolidationInstructions;
};

// Renders instruction block, prior profile, snapshot and latest exchange,
// in that order. Rejects templates missing the extraction directives or
// the update rule.
inline std::string build_consolidation_prompt(const ConsolidationRequest& req) {
    static constexpr const char* required[] = {
        "Project goals and hypotheses", "Analysis parameters",
        "Dataset specifications",       "Preferences",
        "UPDATE the profile with the most recent value", "Preserve technical precision.",
    };
    for (const char* part : required) {
        if (req.prompt_template.find(part) == std::string::npos)
            throw ConfigError(std::string("consolidation template missing section: ") + part);
    }
    std::string prompt = req.prompt_template;
    prompt += "\n\n";
    if (!req.prior_profile.text.empty()) {
        prompt += kExistingProfileHeader;
        prompt += '\n';
        prompt += req.prior_profile.text;
        prompt += "\n\n";
    }
    prompt += kRecentMessagesHeader;
    prompt += '\n';
    prompt += serialize_history(req.episodic_snapshot);
    prompt += "\n\n";
    prompt += kLatestExchangeHeader;
    prompt += '\n';
    prompt += serialize_message(req.latest_exchange.first);
    prompt += '\n';
    prompt += serialize_message(req.latest_exchange.second);
    return prompt;
}

struct ConsolidationResult {
    SemanticProfile profile;          // updated, or the retained prior on failure
    bool updated = false;
    std::vector<CallRecord> calls;    // one record per attempt
    std::string error;
};

inline ConsolidationResult consolidate(const ConsolidationRequest& req, ChatBackend& backend,
                                       const ConsolidationPolicy& policy,
                                       const TokenCounter& counter = {}) {
    policy.validate();
    ConsolidationResult result;
    std::string prompt = build_consolidation_prompt(req);
    ChatResult reply = complete_with_retry(backend, prompt, &result.calls, policy.max_retries);
    if (reply.record.outcome != CallRecord::Outcome::ok || reply.text.empty()) {
        result.profile = req.prior_profile;  // graceful degradation
        result.error = reply.record.outcome == CallRecord::Outcome::ok
                           ? "empty consolidation response"
                           : std::string(outcome_label(reply.record.outcome));
        return result;
    }
    result.profile.text = std::move(reply.text);
    result.profile.version = req.prior_profile.version + 1;
    result.profile.token_count = counter.count(result.profile.text);
    result.profile.last_consolidated_index =
        static_cast<std::int64_t>(std::max(req.latest_exchange.first.index, req.latest_exchange.second.index));
    result.updated = true;
    return result;
}

// Consolidation triggers on agent turns only. Conversations alternate
// user/agent starting at index 0 = user, so the agent turn ordinal of
// message index i is (i + 1) / 2.
inline bool should_consolidate(std::uint64_t message_index, const ConsolidationPolicy& policy) {
    if (message_index % 2 == 0) return false;  // user turn
    std::uint64_t agent_ordinal = (message_index + 1) / 2;
    return agent_ordinal % policy.cadence == 0;
}

// Deterministic consolidator used for offline property tests of the
// conflict-resolution and replacement stages. It parses "FACT key=value"
// markers from the prompt sections and merges them by temporal precedence:
// the profile keeps one line per key, latest value wins, first-seen key
// order is preserved.
class RuleBasedConsolidatorBackend final : public ChatBackend {
public:
    explicit RuleBasedConsolidatorBackend(ChatBackendSpec spec = {}, LatencyModel latency = {},
                                          TokenCounter counter = {})
        : spec_(std::move(spec)), latency_(latency), counter_(counter) {
        spec_.kind = BackendKind::scripted;
        spec_.model = "rule-based-consolidator";
        spec_.temperature = 0.0;
    }

    ChatResult complete(const std::string& prompt) override {
        ChatResult result;
        result.record.input_tokens = counter_.count(prompt);
        result.record.wall_latency = latency_.simulate(result.record.input_tokens);
        if (result.record.input_tokens > spec_.context_limit) {
            result.record.outcome = CallRecord::Outcome::overflow;
            return result;
        }
        result.text = merge(prompt);
        if (result.text.empty()) result.text = kEmptyProfilePlaceholder;
        result.record.output_tokens = counter_.count(result.text);
        return result;
    }

    const ChatBackendSpec& spec() const override { return spec_; }

    // Exposed for direct use in generators and tests.
    static std::string merge(const std::string& prompt) {
        std::vector<FactAssertion> ordered;
        auto absorb = [&ordered](const std::vector<FactAssertion>& facts) {
            for (const auto& f : facts) {
                bool found = false;
                for (auto& existing : ordered) {
                    if (existing.key == f.key) {
                        existing.value = f.value;  // temporal precedence
                        found = true;
                        break;
                    }
                }
                if (!found) ordered.push_back(f);
            }
        };
        absorb(scan_facts(section(prompt, kExistingProfileHeader)));
        absorb(scan_facts(section(prompt, kRecentMessagesHeader)));
        absorb(scan_facts(section(prompt, kLatestExchangeHeader)));
        std::string out;
        for (const auto& f : ordered) {
            if (!out.empty()) out += '\n';
            out += render_fact_marker(f.key, f.value);
        }
        return out;
    }

private:
    static std::string section(const std::string& prompt, const char* header) {
        std::size_t at = prompt.find(header);
        if (at == std::string::npos) return {};
        std::size_t begin = at + std::string(header).size();
        static constexpr const char* headers[] = {kExistingProfileHeader, kRecentMessagesHeader,
                                                  kLatestExchangeHeader};
        std::size_t end = prompt.size();
        for (const char* h : headers) {
            if (std::string(h) == header) continue;
            std::size_t other = prompt.find(h, begin);
            if (other != std::string::npos && other < end) end = other;
        }
        return prompt.substr(begin, end - begin);
    }

    ChatBackendSpec spec_;
    LatencyModel latency_;
    TokenCounter counter_;
};

// Degraded consolidator for ablation runs: behaves like the rule-based
// oracle but silently drops roughly half of all keys (by key hash parity),
// modeling lossy extraction.
class LossyConsolidatorBackend final : public ChatBackend {
public:
    explicit LossyConsolidatorBackend(ChatBackendSpec spec = {}, LatencyModel latency = {},
                                      TokenCounter counter = {})
        : inner_(std::move(spec), latency, counter), counter_(counter) {}

    ChatResult complete(const std::string& prompt) override {
        ChatResult result = inner_.complete(prompt);
        if (result.record.outcome != CallRecord::Outcome::ok) return result;
        std::string filtered;
        std::size_t pos = 0;
        while (pos <= result.text.size()) {
            std::size_t end = result.text.find('\n', pos);
            if (end == std::string::npos) end = result.text.size();
            std::string_view line(result.text.data() + pos, end - pos);
            auto facts = scan_facts(line);
            if (!facts.empty() && fnv1a64(facts.front().key) % 2 == 0) {
                if (!filtered.empty()) filtered += '\n';
                filtered += line;
            }
            if (end == result.text.size()) break;
            pos = end + 1;
        }
        result.text = std::move(filtered);
        if (result.text.empty()) result.text = kEmptyProfilePlaceholder;
        result.record.output_tokens = counter_.count(result.text);
        return result;
    }

    const ChatBackendSpec& spec() const override { return inner_.spec(); }

private:
    RuleBasedConsolidatorBackend inner_;
    TokenCounter counter_;
};

// Atomic profile snapshot store: readers observe either the complete old
// text or the complete new text, never a mixture.
class ProfileStore {
public:
    ProfileStore() : current_(std::make_shared<const SemanticProfile>()) {}

    std::shared_ptr<const SemanticProfile> snapshot() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return current_;
    }

    void publish(SemanticProfile profile) {
        auto next = std::make_shared<const SemanticProfile>(std::move(profile));
        std::lock_guard<std::mutex> lock(mutex_);
        if (next->last_consolidated_index < current_->last_consolidated_index)
            throw std::invalid_argument("ProfileStore: last_consolidated_index must be non-decreasing");
        current_ = std::move(next);
    }

private:
    std::shared_ptr<const SemanticProfile> current_;
    mutable std::mutex mutex_;
};

struct ConsolidationJob {
    std::vector<Message> episodic_snapshot;
    std::pair<Message, Message> latest_exchange;
};

// Runs consolidations on a single worker so they are serialized in message
// order with at most one in flight; inference reads ProfileStore snapshots
// and never blocks on the worker.
class AsyncConsolidator {
public:
    AsyncConsolidator(ProfileStore& store, ChatBackend& backend, ConsolidationPolicy policy,
                      TokenCounter counter = {})
        : store_(store), backend_(backend), policy_(policy), counter_(counter),
          worker_([this] { run(); }) {}

    ~AsyncConsolidator() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stopping_ = true;
        }
        cv_.notify_all();
        worker_.join();
    }

    void enqueue(ConsolidationJob job) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            queue_.push_back(std::move(job));
        }
        cv_.notify_all();
    }

    // Blocks until every queued consolidation has been applied.
    void drain() {
        std::unique_lock<std::mutex> lock(mutex_);
        drained_cv_.wait(lock, [this] { return queue_.empty() && !in_flight_; });
    }

    std::size_t failure_count() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return failures_;
    }

private:
    void run() {
        for (;;) {
            ConsolidationJob job;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
                if (queue_.empty()) return;
                job = std::move(queue_.front());
                queue_.pop_front();
                in_flight_ = true;
            }
            ConsolidationRequest req;
            req.episodic_snapshot = std::move(job.episodic_snapshot);
            req.prior_profile = *store_.snapshot();
            req.latest_exchange = std::move(job.latest_exchange);
            ConsolidationResult result = consolidate(req, backend_, policy_, counter_);
            if (result.updated) store_.publish(result.profile);
            {
                std::lock_guard<std::mutex> lock(mutex_);
                if (!result.updated) ++failures_;
                in_flight_ = false;
            }
            drained_cv_.notify_all();
        }
    }

    ProfileStore& store_;
    ChatBackend& backend_;
    ConsolidationPolicy policy_;
    TokenCounter counter_;
    std::deque<ConsolidationJob> queue_;
    bool stopping_ = false;
    bool in_flight_ = false;
    std::size_t failures_ = 0;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable drained_cv_;
    std::thread worker_;
};

// Dual-context inference input: profile plus episodic window.
inline AssembledContext assemble_context(const SemanticProfile& profile, const EpisodicBuffer& buffer,
                                         const std::string& query, const TokenCounter& counter,
                                         const std::string& system_preamble = {}) {
    return assemble_context(profile.text, buffer.window(), query, counter, system_preamble);
}

}  // namespace dualmem
