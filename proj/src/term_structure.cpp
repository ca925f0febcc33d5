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

#include "cdsflow/term_structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cdsflow/reduce.hpp"

namespace cdsflow {

namespace {

const char* kind_name(CurveKind kind) {
    return kind == CurveKind::Interest ? "interest" : "hazard";
}

void require_kind(const TermStructure& curve, CurveKind expected, const char* op) {
    if (curve.kind() != expected)
        throw std::invalid_argument(std::string(op) + ": expected a " + kind_name(expected) +
                                    " curve, got a " + kind_name(curve.kind()) + " curve");
}

void require_query_time(double t, const char* op) {
    if (!std::isfinite(t)) throw std::domain_error(std::string(op) + ": time must be finite");
    if (t < 0.0) throw std::domain_error(std::string(op) + ": time must be non-negative");
}

// Walks the step-function segments overlapping [0, t] in time order and
// hands each (width, intensity) pair to `add`. Both hazard accumulation
// orders share this walk, so they see identical term sequences.
template <typename AddFn>
void for_each_hazard_segment(const TermStructure& hazard, double t, AddFn&& add) {
    const std::span<const double> times = hazard.times();
    const std::span<const double> values = hazard.values();
    const std::size_t n = times.size();
    double seg_start = 0.0;
    for (std::size_t k = 0; k < n && seg_start < t; ++k) {
        const double seg_end = (k + 1 < n) ? std::min(times[k + 1], t) : t;
        add(seg_end - seg_start, values[k]);
        seg_start = seg_end;
    }
}

}  // namespace

TermStructure::TermStructure(CurveKind kind, std::vector<RatePoint> nodes) : kind_(kind) {
    if (nodes.empty()) throw std::invalid_argument("TermStructure: node list must not be empty");
    times_.reserve(nodes.size());
    values_.reserve(nodes.size());
    double prev_time = -1.0;
    for (const RatePoint& node : nodes) {
        if (!std::isfinite(node.time) || node.time < 0.0)
            throw std::invalid_argument("TermStructure: node times must be finite and non-negative");
        if (node.time <= prev_time)
            throw std::invalid_argument("TermStructure: node times must be strictly increasing");
        if (!std::isfinite(node.value))
            throw std::invalid_argument("TermStructure: node values must be finite");
        if (kind == CurveKind::Hazard && node.value < 0.0)
            throw std::invalid_argument("TermStructure: hazard intensities must be non-negative");
        times_.push_back(node.time);
        values_.push_back(node.value);
        prev_time = node.time;
    }
}

TermStructure TermStructure::flat(CurveKind kind, double value) {
    return TermStructure(kind, {{1.0, value}});
}

double interpolate_rate(const TermStructure& curve, double t) {
    if (!std::isfinite(t)) throw std::domain_error("interpolate_rate: time must be finite");
    const std::span<const double> times = curve.times();
    const std::span<const double> values = curve.values();
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    return values[hi - 1] + w * (values[hi] - values[hi - 1]);
}

double discount_factor(const TermStructure& interest, double t) {
    require_kind(interest, CurveKind::Interest, "discount_factor");
    require_query_time(t, "discount_factor");
    return std::exp(-interpolate_rate(interest, t) * t);
}

double cumulative_hazard(const TermStructure& hazard, double t) {
    require_kind(hazard, CurveKind::Hazard, "cumulative_hazard");
    require_query_time(t, "cumulative_hazard");
    double sum = 0.0;
    for_each_hazard_segment(hazard, t, [&](double width, double intensity) { sum += width * intensity; });
    return sum;
}

double cumulative_hazard_strided(const TermStructure& hazard, double t, unsigned lanes) {
    require_kind(hazard, CurveKind::Hazard, "cumulative_hazard");
    require_query_time(t, "cumulative_hazard");
    LaneAccumulator acc(lanes);
    for_each_hazard_segment(hazard, t, [&](double width, double intensity) { acc.add(width * intensity); });
    return acc.total();
}

double survival_probability(const TermStructure& hazard, double t) {
    return std::exp(-cumulative_hazard(hazard, t));
}

double survival_probability_strided(const TermStructure& hazard, double t, unsigned lanes) {
    return std::exp(-cumulative_hazard_strided(hazard, t, lanes));
}

double default_probability(const TermStructure& hazard, double t) {
    return 1.0 - survival_probability(hazard, t);
}

}  // namespace cdsflow
