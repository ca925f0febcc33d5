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

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdsflow/pricing.hpp"
#include "cdsflow/schedule.hpp"
#include "cdsflow/term_structure.hpp"

namespace cdsflow {

/// Input file problem; the message carries the file name and, for CSV,
/// the 1-based line number (or the element index for JSON arrays).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a curve from `time,rate` CSV or a JSON array of {"time", "rate"}
/// objects; the file extension picks the format (.json means JSON,
/// anything else CSV). Node validation failures carry their location.
TermStructure load_term_structure(const std::filesystem::path& path, CurveKind kind);

/// Writes a curve in the format load_term_structure reads, with full
/// round-trip precision.
void save_term_structure(const TermStructure& curve, const std::filesystem::path& path);

/// Reads options from `maturity,frequency,recovery` CSV or the JSON
/// equivalent. Field validation failures carry their location.
std::vector<CdsOption> load_options(const std::filesystem::path& path);

/// Writes options in the format load_options reads.
void save_options(std::span<const CdsOption> options, const std::filesystem::path& path);

enum class ResultFormat { Csv, Json };

/// Writes results as index,spread_bps,premium_pv,payoff_pv,accrual_pv
/// rows (or JSON objects with those keys, plus "error" for failed
/// options). Numbers carry 17 significant digits, enough to reproduce
/// every double exactly.
void write_results(std::span<const SpreadResult> results, std::ostream& out, ResultFormat format);
void write_results(std::span<const SpreadResult> results, const std::filesystem::path& path,
                   ResultFormat format);

/// Synthetic pricing problem: curves plus an option batch.
struct Workload {
    TermStructure interest;
    TermStructure hazard;
    std::vector<CdsOption> options;
};

/// Deterministic random workload: two curves with num_rate_nodes nodes
/// spread over 30 years (interest rates in [-0.01, 0.06], hazard
/// intensities in [0.001, 0.08]) and options with maturities in
/// [0.5, 10], frequencies from {1, 2, 4, 12} and recoveries in [0, 0.9].
/// The same seed always produces the same workload, bit for bit.
Workload generate_workload(std::size_t num_options, std::size_t num_rate_nodes = 1024,
                           std::uint64_t seed = 42);

}  // namespace cdsflow
