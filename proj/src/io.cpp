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

#include "cdsflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace cdsflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& message) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + message);
}

[[noreturn]] void fail_element(const std::filesystem::path& path, std::size_t element,
                               const std::string& message) {
    throw ParseError(path.string() + ": element " + std::to_string(element) + ": " + message);
}

[[noreturn]] void fail_file(const std::filesystem::path& path, const std::string& message) {
    throw ParseError(path.string() + ": " + message);
}

bool is_json(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".json";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line,
                    const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail_at(path, line, std::string(what) + ": not a number: '" + std::string(field) + "'");
    return value;
}

int parse_int(std::string_view field, const std::filesystem::path& path, std::size_t line,
              const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail_at(path, line, std::string(what) + ": not an integer: '" + std::string(field) + "'");
    return value;
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_file(path, "cannot open file for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
    return out;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail_file(path, e.what());
    }
    if (!doc.is_array()) fail_file(path, "expected a top-level JSON array");
    return doc;
}

double json_number(const json& obj, const char* key, const std::filesystem::path& path,
                   std::size_t element) {
    if (!obj.contains(key))
        fail_element(path, element, std::string("missing field '") + key + "'");
    if (!obj[key].is_number())
        fail_element(path, element, std::string("field '") + key + "' must be a number");
    return obj[key].get<double>();
}

// Walks CSV rows, skipping blank lines, after checking the header.
template <typename RowFn>
void for_each_csv_row(const std::filesystem::path& path, std::string_view expected_header,
                      RowFn&& row_fn) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_number = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view content = trim(line);
        if (content.empty()) continue;
        if (!saw_header) {
            if (content != expected_header)
                fail_at(path, line_number,
                        "expected header '" + std::string(expected_header) + "'");
            saw_header = true;
            continue;
        }
        row_fn(content, line_number);
    }
    if (!saw_header) fail_file(path, "empty file, expected header '" + std::string(expected_header) + "'");
}

}  // namespace

TermStructure load_term_structure(const std::filesystem::path& path, CurveKind kind) {
    std::vector<RatePoint> nodes;
    if (is_json(path)) {
        const json doc = load_json(path);
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (!doc[i].is_object())
                fail_element(path, i, "expected an object with 'time' and 'rate'");
            nodes.push_back(
                {json_number(doc[i], "time", path, i), json_number(doc[i], "rate", path, i)});
        }
        if (nodes.empty()) fail_file(path, "curve has no nodes");
        try {
            return TermStructure(kind, std::move(nodes));
        } catch (const std::invalid_argument& e) {
            fail_file(path, e.what());
        }
    }
    for_each_csv_row(path, "time,rate", [&](std::string_view row, std::size_t line_number) {
        const auto fields = split_fields(row);
        if (fields.size() != 2) fail_at(path, line_number, "expected 2 fields: time,rate");
        const double time = parse_double(fields[0], path, line_number, "time");
        const double rate = parse_double(fields[1], path, line_number, "rate");
        // Re-run the curve invariants per row so violations carry a line.
        if (!std::isfinite(time) || time < 0.0)
            fail_at(path, line_number, "node times must be finite and non-negative");
        if (!nodes.empty() && time <= nodes.back().time)
            fail_at(path, line_number, "node times must be strictly increasing");
        if (!std::isfinite(rate)) fail_at(path, line_number, "node values must be finite");
        if (kind == CurveKind::Hazard && rate < 0.0)
            fail_at(path, line_number, "hazard intensities must be non-negative");
        nodes.push_back({time, rate});
    });
    if (nodes.empty()) fail_file(path, "curve has no nodes");
    return TermStructure(kind, std::move(nodes));
}

void save_term_structure(const TermStructure& curve, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    if (is_json(path)) {
        json doc = json::array();
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const RatePoint node = curve.node(i);
            doc.push_back({{"time", node.time}, {"rate", node.value}});
        }
        out << doc.dump(2) << '\n';
        return;
    }
    out << "time,rate\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const RatePoint node = curve.node(i);
        out << format_double(node.time) << ',' << format_double(node.value) << '\n';
    }
}

std::vector<CdsOption> load_options(const std::filesystem::path& path) {
    std::vector<CdsOption> options;
    const auto check = [&](const CdsOption& option, auto&& fail) {
        try {
            option.validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        options.push_back(option);
    };
    if (is_json(path)) {
        const json doc = load_json(path);
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (!doc[i].is_object())
                fail_element(path, i, "expected an object with 'maturity', 'frequency', 'recovery'");
            if (!doc[i].contains("frequency") || !doc[i]["frequency"].is_number_integer())
                fail_element(path, i, "field 'frequency' must be an integer");
            CdsOption option{json_number(doc[i], "maturity", path, i),
                             doc[i]["frequency"].get<int>(),
                             json_number(doc[i], "recovery", path, i)};
            check(option, [&](const std::string& msg) { fail_element(path, i, msg); });
        }
        return options;
    }
    for_each_csv_row(path, "maturity,frequency,recovery",
                     [&](std::string_view row, std::size_t line_number) {
                         const auto fields = split_fields(row);
                         if (fields.size() != 3)
                             fail_at(path, line_number,
                                     "expected 3 fields: maturity,frequency,recovery");
                         CdsOption option{
                             parse_double(fields[0], path, line_number, "maturity"),
                             parse_int(fields[1], path, line_number, "frequency"),
                             parse_double(fields[2], path, line_number, "recovery")};
                         check(option,
                               [&](const std::string& msg) { fail_at(path, line_number, msg); });
                     });
    return options;
}

void save_options(std::span<const CdsOption> options, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    if (is_json(path)) {
        json doc = json::array();
        for (const CdsOption& option : options)
            doc.push_back({{"maturity", option.maturity},
                           {"frequency", option.payment_frequency},
                           {"recovery", option.recovery_rate}});
        out << doc.dump(2) << '\n';
        return;
    }
    out << "maturity,frequency,recovery\n";
    for (const CdsOption& option : options)
        out << format_double(option.maturity) << ',' << option.payment_frequency << ','
            << format_double(option.recovery_rate) << '\n';
}

void write_results(std::span<const SpreadResult> results, std::ostream& out, ResultFormat format) {
    if (format == ResultFormat::Json) {
        json doc = json::array();
        for (const SpreadResult& result : results) {
            json row{{"index", result.option_index},
                     {"spread_bps", result.spread_bps},
                     {"premium_pv", result.legs.premium_pv},
                     {"payoff_pv", result.legs.payoff_pv},
                     {"accrual_pv", result.legs.accrual_pv}};
            if (!result.ok()) row["error"] = result.error;
            doc.push_back(std::move(row));
        }
        out << doc.dump(2) << '\n';
        return;
    }
    out << "index,spread_bps,premium_pv,payoff_pv,accrual_pv\n";
    for (const SpreadResult& result : results)
        out << result.option_index << ',' << format_double(result.spread_bps) << ','
            << format_double(result.legs.premium_pv) << ',' << format_double(result.legs.payoff_pv)
            << ',' << format_double(result.legs.accrual_pv) << '\n';
}

void write_results(std::span<const SpreadResult> results, const std::filesystem::path& path,
                   ResultFormat format) {
    std::ofstream out = open_output(path);
    write_results(results, out, format);
}

Workload generate_workload(std::size_t num_options, std::size_t num_rate_nodes,
                           std::uint64_t seed) {
    if (num_rate_nodes < 1)
        throw std::invalid_argument("generate_workload: num_rate_nodes must be >= 1");
    std::mt19937_64 rng(seed);
    // Fixed mapping from raw engine output, so the workload never depends
    // on the standard library's distribution implementations.
    const auto uniform = [&rng](double lo, double hi) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };

    const auto curve_times = [&](std::size_t n) {
        std::vector<double> times(n);
        const double step = 30.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            // Jitter below step/2 keeps the times strictly increasing.
            times[i] = step * static_cast<double>(i + 1) + 0.4 * step * (uniform(0.0, 1.0) - 0.5);
        return times;
    };

    std::vector<RatePoint> interest_nodes;
    for (double t : curve_times(num_rate_nodes)) interest_nodes.push_back({t, uniform(-0.01, 0.06)});
    std::vector<RatePoint> hazard_nodes;
    for (double t : curve_times(num_rate_nodes)) hazard_nodes.push_back({t, uniform(0.001, 0.08)});

    static constexpr int kFrequencies[] = {1, 2, 4, 12};
    std::vector<CdsOption> options;
    options.reserve(num_options);
    for (std::size_t i = 0; i < num_options; ++i) {
        CdsOption option;
        option.maturity = uniform(0.5, 10.0);
        option.payment_frequency = kFrequencies[rng() % 4];
        option.recovery_rate = uniform(0.0, 0.9);
        options.push_back(option);
    }

    return Workload{TermStructure(CurveKind::Interest, std::move(interest_nodes)),
                    TermStructure(CurveKind::Hazard, std::move(hazard_nodes)),
                    std::move(options)};
}

}  // namespace cdsflow
