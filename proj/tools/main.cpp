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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdsflow/io.hpp"
#include "cdsflow/pipeline.hpp"
#include "cdsflow/pricing.hpp"
#include "cdsflow/scaler.hpp"

namespace {

using cdsflow::EngineConfig;
using cdsflow::SpreadResult;

struct PriceArgs {
    std::string options_path;
    std::string interest_path;
    std::string hazard_path;
    std::string engine = "pipeline";
    EngineConfig config;
    std::string out_path;
    std::string format = "csv";
};

struct BenchArgs {
    std::size_t num_options = 10000;
    std::size_t num_rate_nodes = 1024;
    std::uint64_t seed = 42;
    unsigned repeats = 3;
    std::vector<std::string> sweeps;
    std::string json_path;
    bool stage_stats = false;
};

struct GenArgs {
    std::size_t num_options = 10000;
    std::size_t num_rate_nodes = 1024;
    std::uint64_t seed = 42;
    std::string out_dir;
};

int run_price(const PriceArgs& args) {
    const auto interest =
        cdsflow::load_term_structure(args.interest_path, cdsflow::CurveKind::Interest);
    const auto hazard = cdsflow::load_term_structure(args.hazard_path, cdsflow::CurveKind::Hazard);
    const auto options = cdsflow::load_options(args.options_path);

    std::vector<SpreadResult> results;
    if (args.engine == "oracle")
        results = cdsflow::price_batch(options, interest, hazard);
    else
        results = cdsflow::run_engines(options, interest, hazard, args.config);

    const auto format =
        args.format == "json" ? cdsflow::ResultFormat::Json : cdsflow::ResultFormat::Csv;
    if (args.out_path.empty())
        cdsflow::write_results(results, std::cout, format);
    else
        cdsflow::write_results(results, std::filesystem::path(args.out_path), format);

    const auto failed = static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const SpreadResult& r) { return !r.ok(); }));
    if (failed > 0)
        std::cerr << "warning: " << failed << " of " << results.size()
                  << " options failed; see the error column\n";
    return 0;
}

// One measured configuration of the bench run.
struct BenchVariant {
    std::string name;
    std::vector<double> options_per_second;
    double mean = 0.0;
    double stddev = 0.0;
};

void finish(BenchVariant& variant) {
    double sum = 0.0;
    for (double v : variant.options_per_second) sum += v;
    variant.mean = sum / static_cast<double>(variant.options_per_second.size());
    if (variant.options_per_second.size() > 1) {
        double sq = 0.0;
        for (double v : variant.options_per_second) sq += (v - variant.mean) * (v - variant.mean);
        variant.stddev =
            std::sqrt(sq / static_cast<double>(variant.options_per_second.size() - 1));
    }
}

std::vector<unsigned> parse_sweep_values(const std::string& list, const std::string& axis) {
    std::vector<unsigned> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(static_cast<unsigned>(std::stoul(item)));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--sweep", "bad value '" + item + "' for axis " + axis);
        }
    }
    if (values.empty()) throw CLI::ValidationError("--sweep", "no values for axis " + axis);
    return values;
}

int run_bench(const BenchArgs& args) {
    if (args.repeats < 1) throw CLI::ValidationError("--repeats", "must be >= 1");
    std::vector<unsigned> engine_counts{1};
    std::vector<unsigned> replications{EngineConfig{}.replication};
    for (const std::string& sweep : args.sweeps) {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--sweep", "expected axis=v1,v2,... got '" + sweep + "'");
        const std::string axis = sweep.substr(0, eq);
        const std::string list = sweep.substr(eq + 1);
        if (axis == "engines")
            engine_counts = parse_sweep_values(list, axis);
        else if (axis == "replication")
            replications = parse_sweep_values(list, axis);
        else
            throw CLI::ValidationError("--sweep", "unknown axis '" + axis +
                                                      "' (expected engines or replication)");
    }

    std::cout << "generating workload: " << args.num_options << " options, " << args.num_rate_nodes
              << " rate nodes, seed " << args.seed << "\n";
    const cdsflow::Workload workload =
        cdsflow::generate_workload(args.num_options, args.num_rate_nodes, args.seed);

    const auto measure = [&](auto&& run) {
        const auto start = std::chrono::steady_clock::now();
        const auto results = run();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (results.size() != workload.options.size())
            throw std::runtime_error("bench: engine returned a truncated batch");
        return static_cast<double>(results.size()) / elapsed.count();
    };

    std::vector<BenchVariant> variants;
    variants.push_back({"oracle", {}, 0.0, 0.0});
    for (unsigned r = 0; r < args.repeats; ++r)
        variants.back().options_per_second.push_back(measure([&] {
            return cdsflow::price_batch(workload.options, workload.interest, workload.hazard);
        }));
    finish(variants.back());

    for (unsigned engines : engine_counts) {
        for (unsigned replication : replications) {
            EngineConfig config;
            config.engines = engines;
            config.replication = replication;
            BenchVariant variant{"pipeline[engines=" + std::to_string(engines) +
                                     ",replication=" + std::to_string(replication) + "]",
                                 {},
                                 0.0,
                                 0.0};
            for (unsigned r = 0; r < args.repeats; ++r)
                variant.options_per_second.push_back(measure([&] {
                    return cdsflow::run_engines(workload.options, workload.interest,
                                                workload.hazard, config);
                }));
            finish(variant);
            variants.push_back(std::move(variant));
        }
    }

    const double oracle_mean = variants.front().mean;
    std::cout << "\n"
              << std::left << std::setw(44) << "variant" << std::right << std::setw(16)
              << "options/s" << std::setw(12) << "stddev" << std::setw(12) << "vs oracle"
              << "\n";
    for (const BenchVariant& variant : variants) {
        std::cout << std::left << std::setw(44) << variant.name << std::right << std::fixed
                  << std::setprecision(1) << std::setw(16) << variant.mean << std::setw(12)
                  << variant.stddev << std::setprecision(2) << std::setw(11)
                  << variant.mean / oracle_mean << "x\n";
        std::cout.unsetf(std::ios::fixed);
    }
    std::cout << "(" << args.repeats
              << " runs per variant; throughput is hardware-dependent, compare the ratios)\n";

    if (args.stage_stats) {
        EngineConfig config;
        cdsflow::PipelineStats stats;
        cdsflow::run_pipeline(workload.options, workload.interest, workload.hazard, config, &stats);
        std::cout << "\nper-stage counters (engines=1, replication=" << config.replication
                  << "):\n"
                  << std::left << std::setw(24) << "stage" << std::right << std::setw(14) << "in"
                  << std::setw(14) << "out" << std::setw(14) << "blocked_ms"
                  << "\n";
        for (const cdsflow::StageStats& stage : stats.stages)
            std::cout << std::left << std::setw(24) << stage.name << std::right << std::setw(14)
                      << stage.messages_in << std::setw(14) << stage.messages_out << std::setw(14)
                      << stage.blocked_ns / 1000000 << "\n";
    }

    if (!args.json_path.empty()) {
        nlohmann::json doc = nlohmann::json::array();
        for (const BenchVariant& variant : variants)
            doc.push_back({{"variant", variant.name},
                           {"options_per_second", variant.options_per_second},
                           {"repeats", args.repeats},
                           {"mean", variant.mean},
                           {"stddev", variant.stddev}});
        std::ofstream out(args.json_path);
        if (!out) throw std::runtime_error(args.json_path + ": cannot open file for writing");
        out << doc.dump(2) << '\n';
        std::cout << "wrote " << args.json_path << "\n";
    }
    return 0;
}

int run_gen(const GenArgs& args) {
    const cdsflow::Workload workload =
        cdsflow::generate_workload(args.num_options, args.num_rate_nodes, args.seed);
    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    cdsflow::save_term_structure(workload.interest, dir / "interest.csv");
    cdsflow::save_term_structure(workload.hazard, dir / "hazard.csv");
    cdsflow::save_options(workload.options, dir / "options.csv");
    std::cout << "wrote " << (dir / "interest.csv").string() << "\n"
              << "wrote " << (dir / "hazard.csv").string() << "\n"
              << "wrote " << (dir / "options.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDS fair-spread pricer: sequential reference engine and staged dataflow pipeline"};
    app.require_subcommand(1);

    PriceArgs price_args;
    CLI::App* price = app.add_subcommand("price", "Price an option batch and write the results");
    price->add_option("--options", price_args.options_path, "Option batch (CSV or JSON)")
        ->required();
    price->add_option("--interest", price_args.interest_path, "Interest curve (CSV or JSON)")
        ->required();
    price->add_option("--hazard", price_args.hazard_path, "Hazard curve (CSV or JSON)")
        ->required();
    price->add_option("--engine", price_args.engine, "Engine: oracle (sequential) or pipeline")
        ->check(CLI::IsMember({"oracle", "pipeline"}));
    price->add_option("--engines", price_args.config.engines, "Pipeline engine partitions");
    price->add_option("--replication", price_args.config.replication,
                      "Replicated survival workers per engine");
    price->add_option("--lanes", price_args.config.lanes, "Strided reduction lanes");
    price->add_option("--out", price_args.out_path, "Output file (default: stdout)");
    price->add_option("--format", price_args.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Measure pricing throughput (options/second)");
    bench->add_option("--num-options", bench_args.num_options, "Workload size");
    bench->add_option("--rates", bench_args.num_rate_nodes, "Curve nodes per term structure");
    bench->add_option("--seed", bench_args.seed, "Workload seed");
    bench->add_option("--repeats", bench_args.repeats, "Timed runs per variant");
    bench->add_option("--sweep", bench_args.sweeps,
                      "Axis sweep, e.g. engines=1,2,5 or replication=1,6 (repeatable)");
    bench->add_option("--json", bench_args.json_path, "Write measurements to a JSON file");
    bench->add_flag("--stage-stats", bench_args.stage_stats,
                    "Print per-stage message counters after the runs");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate a deterministic random workload");
    gen->add_option("--num-options", gen_args.num_options, "Options to generate");
    gen->add_option("--rates", gen_args.num_rate_nodes, "Curve nodes per term structure");
    gen->add_option("--seed", gen_args.seed, "Workload seed");
    gen->add_option("--out-dir", gen_args.out_dir, "Directory for the generated files")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return run_price(price_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (gen->parsed()) return run_gen(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
