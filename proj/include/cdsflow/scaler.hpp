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

#include <span>
#include <vector>

#include "cdsflow/pipeline.hpp"

namespace cdsflow {

/// Prices a batch across config.engines independent pipeline engines.
///
/// The batch splits into contiguous chunks of ceil(size / engines)
/// options; each engine prices its chunk concurrently against the shared
/// (never copied) curves, and the chunks are merged back in order with
/// the original option indices. Every option runs through an identical
/// engine on an identical sub-sequence, so the merged results are
/// bit-identical for every engine count.
///
/// With `engine_stats` set, one PipelineStats per active engine is
/// filled. If any engine faults, throws std::runtime_error naming the
/// engine and its failed stage.
std::vector<SpreadResult> run_engines(std::span<const CdsOption> options,
                                      const TermStructure& interest, const TermStructure& hazard,
                                      const EngineConfig& config = {},
                                      std::vector<PipelineStats>* engine_stats = nullptr);

}  // namespace cdsflow
