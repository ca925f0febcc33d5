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

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace cdsflow {

/// Upper bound on the lane count accepted by the strided reductions.
inline constexpr unsigned kMaxLanes = 64;

/// Default lane count. Seven matches the result latency of a pipelined
/// double-precision adder, so a hardware implementation of this layout can
/// issue one addition per cycle; on a CPU it simply gives the compiler
/// independent accumulation chains.
inline constexpr unsigned kDefaultLanes = 7;

/// Accumulates values round-robin into `lanes` independent partial sums.
///
/// A naive running sum serialises on the latency of each floating-point
/// add. Striding the input over several lanes (element k lands in lane
/// k mod lanes) breaks that dependency; the lane partials are folded
/// left-to-right at the end. Reordering the adds can change the result
/// by rounding only; with lanes == 1 the result is bit-identical to the
/// naive left fold.
class LaneAccumulator {
public:
    explicit LaneAccumulator(unsigned lanes) : lane_count_(lanes) {
        if (lanes < 1 || lanes > kMaxLanes)
            throw std::invalid_argument("LaneAccumulator: lane count must be in [1, 64]");
        for (unsigned j = 0; j < lane_count_; ++j) sums_[j] = 0.0;
    }

    void add(double value) {
        sums_[next_] += value;
        if (++next_ == lane_count_) next_ = 0;
    }

    /// Sequential left-to-right fold of the lane partials.
    double total() const {
        double sum = 0.0;
        for (unsigned j = 0; j < lane_count_; ++j) sum += sums_[j];
        return sum;
    }

    unsigned lanes() const { return lane_count_; }

private:
    std::array<double, kMaxLanes> sums_;
    unsigned lane_count_;
    unsigned next_ = 0;
};

/// One weight * value term of a weighted reduction.
struct WeightedValue {
    double weight;
    double value;
};

/// Sum of `values` over `lanes` interleaved partial sums. Lengths that do
/// not divide evenly by the lane count leave the trailing lanes one element
/// short; an empty input sums to 0.0.
inline double strided_sum(std::span<const double> values, unsigned lanes) {
    LaneAccumulator acc(lanes);
    for (double v : values) acc.add(v);
    return acc.total();
}

/// Sum of weight * value products with the same lane assignment rule.
inline double strided_weighted_sum(std::span<const WeightedValue> terms, unsigned lanes) {
    LaneAccumulator acc(lanes);
    for (const WeightedValue& term : terms) acc.add(term.weight * term.value);
    return acc.total();
}

}  // namespace cdsflow
