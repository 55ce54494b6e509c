/*
 * Episodic buffer: fixed-capacity sliding window over the most recent W
 * substantive turns. Constant memory regardless of conversation length.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "dualmem/message.hpp"

namespace dualmem {

class EpisodicBuffer {
public:
    explicit EpisodicBuffer(std::size_t capacity = 10) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("EpisodicBuffer: capacity must be positive");
    }

    // Strict sequencing: msg.index must equal the number of messages seen so
    // far. System messages advance the sequence but never enter the window.
    void append(const Message& msg) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (msg.index != seen_) {
            throw std::invalid_argument("EpisodicBuffer: out-of-sequence append (expected index " +
                                        std::to_string(seen_) + ", got " + std::to_string(msg.index) + ")");
        }
        ++seen_;
        if (msg.role == Role::system) return;
        entries_.push_back(msg);
        ++total_appended_;
        if (entries_.size() > capacity_) entries_.pop_front();
    }

    // Snapshot in append order; later appends never mutate a prior snapshot.
    std::vector<Message> window() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return {entries_.begin(), entries_.end()};
    }

    std::size_t capacity() const { return capacity_; }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return entries_.size();
    }

    // Count of substantive (non-system) messages appended.
    std::uint64_t total_appended() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return total_appended_;
    }

    std::uint64_t next_index() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return seen_;
    }

private:
    std::size_t capacity_;
    std::deque<Message> entries_;
    std::uint64_t total_appended_ = 0;
    std::uint64_t seen_ = 0;
    mutable std::mutex mutex_;
};

}  // namespace dualmem
