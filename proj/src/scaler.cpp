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

#include "cdsflow/scaler.hpp"

#include <stdexcept>
#include <string>
#include <thread>

namespace cdsflow {

std::vector<SpreadResult> run_engines(std::span<const CdsOption> options,
                                      const TermStructure& interest, const TermStructure& hazard,
                                      const EngineConfig& config,
                                      std::vector<PipelineStats>* engine_stats) {
    config.validate();
    if (options.empty()) throw std::invalid_argument("run_engines: option batch must not be empty");

    struct EngineRun {
        std::size_t base;
        std::span<const CdsOption> slice;
        std::vector<SpreadResult> results;
        std::string error;
    };

    const std::size_t chunk = (options.size() + config.engines - 1) / config.engines;
    std::vector<EngineRun> runs;
    for (std::size_t base = 0; base < options.size(); base += chunk)
        runs.push_back({base, options.subspan(base, std::min(chunk, options.size() - base)), {}, {}});

    if (engine_stats) engine_stats->assign(runs.size(), PipelineStats{});

    const auto price_chunk = [&](std::size_t e) {
        try {
            PipelineStats* stats = engine_stats ? &(*engine_stats)[e] : nullptr;
            runs[e].results = run_pipeline(runs[e].slice, interest, hazard, config, stats);
        } catch (const std::exception& ex) {
            runs[e].error = ex.what();
        }
    };

    if (runs.size() == 1) {
        price_chunk(0);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(runs.size());
        for (std::size_t e = 0; e < runs.size(); ++e) threads.emplace_back(price_chunk, e);
    }

    for (std::size_t e = 0; e < runs.size(); ++e)
        if (!runs[e].error.empty())
            throw std::runtime_error("engine " + std::to_string(e) + ": " + runs[e].error);

    std::vector<SpreadResult> merged;
    merged.reserve(options.size());
    for (EngineRun& run : runs) {
        for (SpreadResult& result : run.results) {
            result.option_index += run.base;
            merged.push_back(std::move(result));
        }
    }
    return merged;
}

}  // namespace cdsflow
