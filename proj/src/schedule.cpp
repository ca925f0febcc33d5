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

#include "cdsflow/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace cdsflow {

void CdsOption::validate() const {
    if (!std::isfinite(maturity) || maturity <= 0.0)
        throw std::invalid_argument("CdsOption: maturity must be finite and > 0");
    if (payment_frequency < 1)
        throw std::invalid_argument("CdsOption: payment_frequency must be >= 1");
    if (!(recovery_rate >= 0.0 && recovery_rate <= 1.0))
        throw std::invalid_argument("CdsOption: recovery_rate must be in [0, 1]");
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("TimeGrid: must hold at least one point");
    double prev = 0.0;
    for (double t : points_) {
        if (!std::isfinite(t)) throw std::invalid_argument("TimeGrid: points must be finite");
        if (t <= prev) throw std::invalid_argument("TimeGrid: points must be strictly increasing and > 0");
        prev = t;
    }
}

TimeGrid generate_time_points(const CdsOption& option) {
    option.validate();
    // Working in phase space (maturity * frequency) keeps the stub test a
    // pure fraction comparison instead of a division-dependent residual.
    const double phase = option.maturity * static_cast<double>(option.payment_frequency);
    if (phase > kMaxGridPoints)
        throw std::invalid_argument("generate_time_points: schedule exceeds the grid point limit");
    const auto whole_periods = static_cast<std::size_t>(phase);
    const bool stub = (phase - static_cast<double>(whole_periods)) > kGridMergeTolerance;

    std::vector<double> points;
    points.reserve(whole_periods + 1);
    for (std::size_t k = 1; k <= whole_periods; ++k)
        points.push_back(static_cast<double>(k) / static_cast<double>(option.payment_frequency));
    if (stub || points.empty())
        points.push_back(option.maturity);
    else
        points.back() = option.maturity;  // land exactly on the maturity
    return TimeGrid(std::move(points));
}

}  // namespace cdsflow
