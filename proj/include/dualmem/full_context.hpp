/*
 * Full-context baseline: accumulate the complete history, optionally
 * truncating to the most recent 120k tokens. Truncation drops whole
 * messages only, so the retained set is always a contiguous suffix.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dualmem/context.hpp"
#include "dualmem/message.hpp"

namespace dualmem {

inline constexpr std::size_t kDefaultTruncationLimit = 120000;
inline constexpr std::size_t kDefaultHardModelLimit = 128000;

class FullHistory {
public:
    // truncation_limit = nullopt disables the sliding window entirely; the
    // capacity-scaling tests enable it, the realistic benchmarks run without
    // it and crash at the hard model limit instead.
    explicit FullHistory(std::optional<std::size_t> truncation_limit = kDefaultTruncationLimit,
                         std::size_t hard_model_limit = kDefaultHardModelLimit)
        : truncation_limit_(truncation_limit), hard_model_limit_(hard_model_limit) {}

    void append_and_truncate(const Message& msg) {
        if (msg.index != next_index_)
            throw std::invalid_argument("FullHistory: out-of-sequence append");
        if (truncation_limit_ && msg.token_count > *truncation_limit_)
            throw std::invalid_argument("FullHistory: single message exceeds truncation limit");
        ++next_index_;
        messages_.push_back(msg);
        cumulative_tokens_ += msg.token_count;
        if (truncation_limit_) {
            while (cumulative_tokens_ > *truncation_limit_) {
                cumulative_tokens_ -= messages_.front().token_count;
                messages_.pop_front();
            }
        }
    }

    std::vector<Message> retained() const { return {messages_.begin(), messages_.end()}; }
    std::size_t cumulative_tokens() const { return cumulative_tokens_; }
    std::size_t retained_count() const { return messages_.size(); }
    std::uint64_t total_appended() const { return next_index_; }
    std::size_t hard_model_limit() const { return hard_model_limit_; }
    std::optional<std::size_t> truncation_limit() const { return truncation_limit_; }

    // Index of the oldest retained message; total_appended() if empty.
    std::uint64_t first_retained_index() const {
        return messages_.empty() ? next_index_ : messages_.front().index;
    }

private:
    std::deque<Message> messages_;
    std::size_t cumulative_tokens_ = 0;
    std::optional<std::size_t> truncation_limit_;
    std::size_t hard_model_limit_;
    std::uint64_t next_index_ = 0;
};

enum class ContextOutcome { ok, overflow };

struct FullContextResult {
    ContextOutcome outcome = ContextOutcome::ok;
    AssembledContext context;  // valid only when outcome == ok
    std::size_t total_tokens = 0;
};

// Exceeding the hard model limit is a first-class overflow outcome recorded
// as a crash in benchmarks, never a silent further truncation.
inline FullContextResult full_context_answer_context(const FullHistory& history,
                                                     const std::string& query,
                                                     const TokenCounter& counter,
                                                     const std::string& system_preamble = {}) {
    FullContextResult result;
    AssembledContext ctx = assemble_context({}, history.retained(), query, counter, system_preamble);
    result.total_tokens = ctx.total_tokens;
    if (ctx.total_tokens > history.hard_model_limit()) {
        result.outcome = ContextOutcome::overflow;
        return result;
    }
    result.context = std::move(ctx);
    return result;
}

}  // namespace dualmem
