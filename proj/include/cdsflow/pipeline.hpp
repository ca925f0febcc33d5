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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdsflow/pricing.hpp"
#include "cdsflow/reduce.hpp"
#include "cdsflow/schedule.hpp"
#include "cdsflow/stream.hpp"
#include "cdsflow/term_structure.hpp"

namespace cdsflow {

/// Tuning knobs for one pipeline engine.
struct EngineConfig {
    /// Partial sums used by the strided hazard accumulation.
    unsigned lanes = kDefaultLanes;

    /// Replicated survival/interpolation workers fed round-robin. The
    /// survival and curve lookups dominate the per-point cost, so this
    /// stage is scaled out instead of the cheap leg arithmetic.
    unsigned replication = 6;

    /// Bounded capacity of every inter-stage stream. At least 2, so a
    /// producer can stay one message ahead of its consumer.
    std::size_t stream_capacity = 64;

    /// Independent engine partitions a batch is split across.
    unsigned engines = 1;

    /// Grid points carried per stream message.
    std::size_t frame_size = 32;

    /// Test hooks. Jitter sleeps each stage up to jitter_us before every
    /// message, to shake out ordering assumptions; fail_stage makes the
    /// named stage throw on startup, to exercise failure teardown.
    struct Debug {
        unsigned jitter_us = 0;
        std::uint64_t jitter_seed = 0;
        std::string fail_stage;
    } debug;

    void validate() const;
};

/// Per-stage counters for one run, in stage launch order, plus the
/// identity of the curve storage the engine read (the engine shares the
/// caller's curves; it never copies them).
struct PipelineStats {
    std::vector<StageStats> stages;
    const void* interest_nodes = nullptr;
    const void* hazard_nodes = nullptr;

    const StageStats* find(std::string_view stage_name) const;
};

/// Prices a batch on the staged dataflow engine.
///
/// Stages run concurrently on their own threads, connected by bounded
/// streams; a batch flows through without per-option engine restarts.
/// Results arrive in input order: every stage preserves order, and the
/// round-robin scatter/gather over the replicated workers restores it
/// structurally (message k goes to and is read back from worker
/// k mod replication).
///
/// Per-option input problems (a bad option, an oversized schedule) come
/// back as SpreadResult entries with `error` set. Engine faults (a stage
/// dying) poison the stage graph, and the run throws std::runtime_error
/// naming the failed stage. Passing `stats` enables the per-stage
/// counters; by default they are off and cost nothing.
std::vector<SpreadResult> run_pipeline(std::span<const CdsOption> options,
                                       const TermStructure& interest, const TermStructure& hazard,
                                       const EngineConfig& config = {},
                                       PipelineStats* stats = nullptr);

/// Forwards every input message to the workers, message k to worker
/// k mod workers.size(), then closes all worker streams.
template <typename T>
void round_robin_scatter(BoundedStream<T>& input, std::span<BoundedStream<T>* const> workers,
                         StageStats* stats = nullptr) {
    if (workers.empty()) throw std::invalid_argument("round_robin_scatter: no worker streams");
    std::size_t k = 0;
    while (auto item = input.pop(stats)) {
        workers[k % workers.size()]->push(std::move(*item), stats);
        ++k;
    }
    for (BoundedStream<T>* worker : workers) worker->close();
}

/// Reads worker streams in the same cyclic order the scatter wrote them,
/// handing each message to `consume`. Returns once the next expected
/// stream reports end-of-batch; the remaining streams must then be at
/// end-of-batch too, anything else is a protocol bug and throws
/// std::logic_error.
template <typename T, typename ConsumeFn>
void round_robin_gather_each(std::span<BoundedStream<T>* const> workers, ConsumeFn&& consume,
                             StageStats* stats = nullptr) {
    if (workers.empty()) throw std::invalid_argument("round_robin_gather: no worker streams");
    std::size_t k = 0;
    for (;;) {
        auto item = workers[k % workers.size()]->pop(stats);
        if (!item) break;
        consume(std::move(*item));
        ++k;
    }
    for (std::size_t v = 0; v < workers.size(); ++v) {
        if (v == k % workers.size()) continue;
        if (workers[v]->pop(stats))
            throw std::logic_error("round_robin_gather: worker stream out of cyclic order");
    }
}

/// Merges worker streams back into one, preserving the scatter order,
/// then closes the output.
template <typename T>
void round_robin_gather(std::span<BoundedStream<T>* const> workers, BoundedStream<T>& output,
                        StageStats* stats = nullptr) {
    round_robin_gather_each(workers, [&](T item) { output.push(std::move(item), stats); }, stats);
    output.close();
}

}  // namespace cdsflow
