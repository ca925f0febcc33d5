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

#include "cdsflow/pricing.hpp"

#include <cmath>
#include <stdexcept>

namespace cdsflow {

namespace {

void require_recovery(double recovery_rate) {
    if (!(recovery_rate >= 0.0 && recovery_rate <= 1.0))
        throw std::invalid_argument("payoff_leg: recovery_rate must be in [0, 1]");
}

}  // namespace

double premium_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard) {
    double sum = 0.0;
    double t_prev = 0.0;
    for (double t : grid.points()) {
        sum += premium_term(t - t_prev, discount_factor(interest, t), survival_probability(hazard, t));
        t_prev = t;
    }
    return sum;
}

double payoff_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard,
                  double recovery_rate) {
    require_recovery(recovery_rate);
    double sum = 0.0;
    double t_prev = 0.0;
    double surv_prev = survival_probability(hazard, 0.0);
    for (double t : grid.points()) {
        const double surv = survival_probability(hazard, t);
        sum += payoff_term(discount_factor(interest, period_midpoint(t_prev, t)), surv_prev - surv);
        surv_prev = surv;
        t_prev = t;
    }
    return (1.0 - recovery_rate) * sum;
}

double accrual_leg(const TimeGrid& grid, const TermStructure& interest, const TermStructure& hazard) {
    double sum = 0.0;
    double t_prev = 0.0;
    double surv_prev = survival_probability(hazard, 0.0);
    for (double t : grid.points()) {
        const double surv = survival_probability(hazard, t);
        sum += accrual_term(t - t_prev, discount_factor(interest, period_midpoint(t_prev, t)),
                            surv_prev - surv);
        surv_prev = surv;
        t_prev = t;
    }
    return sum;
}

double fair_spread(const LegValues& legs) {
    const double denominator = legs.premium_pv + legs.accrual_pv;
    if (!(denominator > 0.0))
        throw std::domain_error("fair_spread: premium and accrual legs must sum to a positive value");
    const double spread = 10000.0 * legs.payoff_pv / denominator;
    if (!std::isfinite(spread)) throw std::domain_error("fair_spread: spread is not finite");
    return spread;
}

SpreadResult price_option(const CdsOption& option, const TermStructure& interest,
                          const TermStructure& hazard, std::size_t option_index) {
    const std::string prefix = "option " + std::to_string(option_index) + ": ";
    try {
        const TimeGrid grid = generate_time_points(option);
        // Fused single pass; each term is the exact expression the
        // standalone leg functions use, so the leg values match bitwise.
        double premium = 0.0;
        double payoff_raw = 0.0;
        double accrual = 0.0;
        double t_prev = 0.0;
        double surv_prev = survival_probability(hazard, 0.0);
        for (double t : grid.points()) {
            const double dt = t - t_prev;
            const double surv = survival_probability(hazard, t);
            const double df_end = discount_factor(interest, t);
            const double df_mid = discount_factor(interest, period_midpoint(t_prev, t));
            const double surv_drop = surv_prev - surv;
            premium += premium_term(dt, df_end, surv);
            payoff_raw += payoff_term(df_mid, surv_drop);
            accrual += accrual_term(dt, df_mid, surv_drop);
            surv_prev = surv;
            t_prev = t;
        }
        SpreadResult result;
        result.option_index = option_index;
        result.legs = LegValues{premium, (1.0 - option.recovery_rate) * payoff_raw, accrual};
        result.spread_bps = fair_spread(result.legs);
        return result;
    } catch (const std::domain_error& e) {
        throw std::domain_error(prefix + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(prefix + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

std::vector<SpreadResult> price_batch(std::span<const CdsOption> options,
                                      const TermStructure& interest, const TermStructure& hazard) {
    std::vector<SpreadResult> results;
    results.reserve(options.size());
    for (std::size_t i = 0; i < options.size(); ++i)
        results.push_back(price_option(options[i], interest, hazard, i));
    return results;
}

}  // namespace cdsflow
