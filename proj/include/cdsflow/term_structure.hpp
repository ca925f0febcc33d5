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
#include <span>
#include <vector>

namespace cdsflow {

enum class CurveKind { Interest, Hazard };

/// One curve node: a year fraction and the rate quoted at it.
struct RatePoint {
    double time;
    double value;
};

/// Immutable rate curve over year fractions.
///
/// Interest curves hold continuously-compounded zero rates, linearly
/// interpolated in time with flat extrapolation on both ends. Hazard
/// curves hold default intensities read as a step function: node i's
/// value applies from its time up to the next node's time, the first
/// node's value also covers [0, t_1), and the last node's value extends
/// past the final time.
///
/// Construction validates the nodes (finite, strictly increasing
/// non-negative times, non-negative intensities for hazard curves) and
/// throws std::invalid_argument naming the violation. Instances are
/// immutable afterwards and safe to share across threads without copies.
class TermStructure {
public:
    TermStructure(CurveKind kind, std::vector<RatePoint> nodes);

    /// Single-node curve; interpolation makes it flat everywhere.
    static TermStructure flat(CurveKind kind, double value);

    CurveKind kind() const { return kind_; }
    std::size_t size() const { return times_.size(); }
    std::span<const double> times() const { return times_; }
    std::span<const double> values() const { return values_; }
    RatePoint node(std::size_t i) const { return {times_[i], values_[i]}; }

private:
    CurveKind kind_;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Linear interpolation between the bracketing nodes, flat beyond the
/// first and last. Exact at the nodes. Throws std::domain_error for a
/// non-finite query time.
double interpolate_rate(const TermStructure& curve, double t);

/// exp(-r(t) * t) with r linearly interpolated; exactly 1.0 at t = 0.
/// Requires an interest curve and t >= 0.
double discount_factor(const TermStructure& interest, double t);

/// Integral of the piecewise-constant intensity over [0, t], accumulated
/// as a naive left-to-right running sum over the overlapped segments.
double cumulative_hazard(const TermStructure& hazard, double t);

/// Same integral with the segment terms accumulated across `lanes`
/// strided partial sums; the segment sequence is shared with the naive
/// form, so the two differ by summation order only.
double cumulative_hazard_strided(const TermStructure& hazard, double t, unsigned lanes);

/// exp(-cumulative_hazard(t)); exactly 1.0 at t = 0. Requires a hazard
/// curve and t >= 0.
double survival_probability(const TermStructure& hazard, double t);

/// Survival probability with the strided hazard accumulation.
double survival_probability_strided(const TermStructure& hazard, double t, unsigned lanes);

/// 1 - survival_probability(t).
double default_probability(const TermStructure& hazard, double t);

}  // namespace cdsflow
