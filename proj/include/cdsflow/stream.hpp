/*
 * Copyright 2026 cdsflow contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cdsflow {

/// Counters for one pipeline stage. Each stage's thread writes only its
/// own entry; read the numbers after the run has joined.
struct StageStats {
    std::string name;
    std::uint64_t starts = 0;
    std::uint64_t stops = 0;
    std::uint64_t messages_in = 0;
    std::uint64_t messages_out = 0;
    std::uint64_t blocked_ns = 0;  // time spent waiting on full or empty streams
};

/// Thrown by stream operations once a stage death has poisoned the
/// stream; carries the name of the stage that failed first.
class StreamPoisonedError : public std::runtime_error {
public:
    explicit StreamPoisonedError(std::string origin)
        : std::runtime_error("stream poisoned by stage '" + origin + "'"),
          origin_(std::move(origin)) {}

    const std::string& origin_stage() const { return origin_; }

private:
    std::string origin_;
};

/// Type-erased handle so a dying stage can poison streams of mixed
/// message types.
class StreamBase {
public:
    virtual ~StreamBase() = default;
    virtual void poison(const std::string& origin_stage) = 0;
};

/// Bounded blocking FIFO connecting two pipeline stages.
///
/// push() blocks while the stream is full, pop() while it is empty.
/// close() marks end-of-batch: pop() drains the remaining items and then
/// returns nullopt. Exactly one close per run; closing twice or pushing
/// after close is a stage protocol bug and throws std::logic_error.
/// poison() aborts the stream after a stage death: every blocked or
/// subsequent operation throws StreamPoisonedError naming the origin, so
/// a failure anywhere tears the whole graph down instead of deadlocking.
template <typename T>
class BoundedStream final : public StreamBase {
public:
    explicit BoundedStream(std::size_t capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("BoundedStream: capacity must be >= 1");
    }

    void push(T item, StageStats* stats = nullptr) {
        {
            std::unique_lock lock(mutex_);
            wait(not_full_, lock, stats,
                 [&] { return items_.size() < capacity_ || closed_ || poisoned_; });
            if (poisoned_) throw StreamPoisonedError(poison_origin_);
            if (closed_) throw std::logic_error("BoundedStream: push after close");
            items_.push_back(std::move(item));
            if (stats) ++stats->messages_out;
        }
        not_empty_.notify_one();
    }

    /// nullopt means the stream was closed and fully drained.
    std::optional<T> pop(StageStats* stats = nullptr) {
        std::optional<T> item;
        {
            std::unique_lock lock(mutex_);
            wait(not_empty_, lock, stats,
                 [&] { return !items_.empty() || closed_ || poisoned_; });
            if (poisoned_) throw StreamPoisonedError(poison_origin_);
            if (items_.empty()) return std::nullopt;
            item.emplace(std::move(items_.front()));
            items_.pop_front();
            if (stats) ++stats->messages_in;
        }
        not_full_.notify_one();
        return item;
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            if (poisoned_) return;  // failure shutdown already in progress
            if (closed_) throw std::logic_error("BoundedStream: closed twice");
            closed_ = true;
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    void poison(const std::string& origin_stage) override {
        {
            std::lock_guard lock(mutex_);
            if (!poisoned_) {
                poisoned_ = true;
                poison_origin_ = origin_stage;  // first failure wins
            }
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::size_t capacity() const { return capacity_; }

private:
    template <typename Pred>
    void wait(std::condition_variable& cv, std::unique_lock<std::mutex>& lock, StageStats* stats,
              Pred pred) {
        if (pred()) return;
        if (stats) {
            const auto start = std::chrono::steady_clock::now();
            cv.wait(lock, pred);
            stats->blocked_ns += static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count());
        } else {
            cv.wait(lock, pred);
        }
    }

    mutable std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<T> items_;
    std::size_t capacity_;
    bool closed_ = false;
    bool poisoned_ = false;
    std::string poison_origin_;
};

}  // namespace cdsflow
