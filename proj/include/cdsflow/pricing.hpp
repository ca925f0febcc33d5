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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cdsflow/schedule.hpp"
#include "cdsflow/term_structure.hpp"

namespace cdsflow {

/// Present values of the three contract legs per unit notional.
/// premium_pv and accrual_pv are per unit of annualised spread.
struct LegValues {
    double premium_pv = 0.0;
    double payoff_pv = 0.0;
    double accrual_pv = 0.0;
};

/// Priced option: the fair spread in basis points plus its leg
/// decomposition. `error` is empty on success; batch engines report
/// per-option failures here instead of aborting the whole batch.
struct SpreadResult {
    std::size_t option_index = 0;
    double spread_bps = std::numeric_limits<double>::quiet_NaN();
    LegValues legs;
    std::string error;

    bool ok() const { return error.empty(); }
};

// Per-period terms of the leg discretisation. The sequential engine and
// the dataflow pipeline must agree to the last bit on every term, so both
// build their sums from these exact expressions.

inline double period_midpoint(double t_prev, double t) { return 0.5 * (t_prev + t); }

/// Premium accrues over the period and pays at its end if alive: dt * D(t) * S(t).
inline double premium_term(double dt, double df_end, double surv_end) {
    return dt * df_end * surv_end;
}

/// Default payout discounted from the period midpoint: D(mid) * (S(t_prev) - S(t)).
inline double payoff_term(double df_mid, double surv_drop) {
    return df_mid * surv_drop;
}

/// Premium accrued up to a mid-period default: (dt / 2) * D(mid) * (S(t_prev) - S(t)).
inline double accrual_term(double dt, double df_mid, double surv_drop) {
    return 0.5 * dt * df_mid * surv_drop;
}

/// Value of receiving the spread on each payment date, per unit spread.
double premium_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard);

/// Value of the (1 - recovery) default payout.
double payoff_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard,
                  double recovery_rate);

/// Value of the premium accrued between payment dates when a default
/// strikes mid-period, per unit spread.
double accrual_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard);

/// Fair spread in basis points: 10000 * payoff / (premium + accrual).
/// Throws std::domain_error when the denominator is not positive or the
/// quotient is not finite.
double fair_spread(const LegValues& legs);

/// Sequential reference engine for a single option. Failures are thrown
/// with "option <index>:" prefixed to the message.
SpreadResult price_option(const CdsOption& option, const TermStructure& interest,
                          const TermStructure& hazard, std::size_t option_index = 0);

/// Sequential reference engine over a batch; results keep input order.
std::vector<SpreadResult> price_batch(std::span<const CdsOption> options,
                                      const TermStructure& interest, const TermStructure& hazard);

}  // namespace cdsflow
