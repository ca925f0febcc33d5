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

/// Grid points whose final period would be shorter than this fraction of
/// a year are merged into the maturity point instead.
inline constexpr double kGridMergeTolerance = 1e-12;

/// Refuses schedules beyond this many payment dates.
inline constexpr double kMaxGridPoints = 1e7;

/// One credit default swap quote request.
struct CdsOption {
    double maturity = 0.0;       // years, > 0
    int payment_frequency = 0;   // payments per year, >= 1
    double recovery_rate = 0.0;  // fraction of notional recovered, in [0, 1]

    /// Throws std::invalid_argument naming the violated field.
    void validate() const;
};

/// Strictly increasing payment times, all > 0.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    std::span<const double> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<double> points_;
};

/// Payment dates k / payment_frequency for k = 1, 2, ..., ending exactly
/// on the maturity. A maturity that is not a whole number of periods gets
/// a short stub period at the end; a final period shorter than
/// kGridMergeTolerance is merged into the previous date instead of
/// producing a near-duplicate point.
TimeGrid generate_time_points(const CdsOption& option);

}  // namespace cdsflow
