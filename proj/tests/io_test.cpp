#include "cdsflow/io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support/reference.hpp"

using cdsflow::CdsOption;
using cdsflow::CurveKind;
using cdsflow::load_options;
using cdsflow::load_term_structure;
using cdsflow::ParseError;
using cdsflow::TermStructure;

namespace {

namespace fs = std::filesystem;

// Unique scratch directory, removed when the test binary exits.
const fs::path& scratch_dir() {
    static const struct Scratch {
        fs::path dir;
        Scratch() {
            dir = fs::temp_directory_path() /
                  ("cdsflow_io_test_" + std::to_string(::getpid()));
            fs::create_directories(dir);
        }
        ~Scratch() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } scratch;
    return scratch.dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("curve CSV loads with header and values intact") {
    const auto path = write_file("curve.csv", "time,rate\n1.0,0.02\n2.0,0.04\n");
    const TermStructure curve = load_term_structure(path, CurveKind::Interest);
    REQUIRE(curve.size() == 2);
    CHECK(curve.node(0).time == 1.0);
    CHECK(curve.node(0).value == 0.02);
    CHECK(curve.node(1).time == 2.0);
    CHECK(curve.node(1).value == 0.04);
}

TEST_CASE("curve CSV errors carry the line number") {
    const auto missing = scratch_dir() / "does_not_exist.csv";
    CHECK_THROWS_AS(load_term_structure(missing, CurveKind::Interest), ParseError);

    const auto bad_header = write_file("bad_header.csv", "t,r\n1.0,0.02\n");
    CHECK_THROWS_WITH_AS(load_term_structure(bad_header, CurveKind::Interest),
                         doctest::Contains(":1:"), ParseError);

    const auto bad_number = write_file("bad_number.csv", "time,rate\n1.0,0.02\nfoo,0.04\n");
    CHECK_THROWS_WITH_AS(load_term_structure(bad_number, CurveKind::Interest),
                         doctest::Contains(":3:"), ParseError);

    const auto out_of_order = write_file("out_of_order.csv", "time,rate\n2.0,0.02\n1.0,0.04\n");
    CHECK_THROWS_WITH_AS(load_term_structure(out_of_order, CurveKind::Interest),
                         doctest::Contains("strictly increasing"), ParseError);
    CHECK_THROWS_WITH_AS(load_term_structure(out_of_order, CurveKind::Interest),
                         doctest::Contains(":3:"), ParseError);

    const auto negative_hazard = write_file("neg_hazard.csv", "time,rate\n1.0,-0.02\n");
    CHECK_THROWS_WITH_AS(load_term_structure(negative_hazard, CurveKind::Hazard),
                         doctest::Contains("non-negative"), ParseError);
    CHECK(load_term_structure(negative_hazard, CurveKind::Interest).size() == 1);

    const auto too_few = write_file("too_few.csv", "time,rate\n1.0\n");
    CHECK_THROWS_WITH_AS(load_term_structure(too_few, CurveKind::Interest),
                         doctest::Contains("2 fields"), ParseError);

    const auto empty = write_file("empty.csv", "");
    CHECK_THROWS_AS(load_term_structure(empty, CurveKind::Interest), ParseError);
}

TEST_CASE("curve JSON loads and errors carry the element index") {
    const auto path = write_file("curve.json",
                                 R"([{"time": 1.0, "rate": 0.02}, {"time": 2.0, "rate": 0.04}])");
    const TermStructure curve = load_term_structure(path, CurveKind::Interest);
    REQUIRE(curve.size() == 2);
    CHECK(curve.node(1).value == 0.04);

    const auto missing_field = write_file("missing_field.json", R"([{"time": 1.0}])");
    CHECK_THROWS_WITH_AS(load_term_structure(missing_field, CurveKind::Interest),
                         doctest::Contains("element 0"), ParseError);

    const auto bad_type = write_file("bad_type.json", R"([{"time": 1.0, "rate": "x"}])");
    CHECK_THROWS_WITH_AS(load_term_structure(bad_type, CurveKind::Interest),
                         doctest::Contains("element 0"), ParseError);

    const auto not_array = write_file("not_array.json", R"({"time": 1.0})");
    CHECK_THROWS_WITH_AS(load_term_structure(not_array, CurveKind::Interest),
                         doctest::Contains("array"), ParseError);

    const auto syntax = write_file("syntax.json", "[{");
    CHECK_THROWS_AS(load_term_structure(syntax, CurveKind::Interest), ParseError);
}

TEST_CASE("curves round-trip bit-exactly through both formats") {
    const cdsflow::Workload workload = cdsflow::generate_workload(1, 1024, 3001);
    for (const char* name : {"roundtrip.csv", "roundtrip.json"}) {
        cdsflow::save_term_structure(workload.hazard, scratch_dir() / name);
        const TermStructure loaded = load_term_structure(scratch_dir() / name, CurveKind::Hazard);
        REQUIRE(loaded.size() == workload.hazard.size());
        for (std::size_t i = 0; i < loaded.size(); ++i) {
            CHECK(loaded.node(i).time == workload.hazard.node(i).time);
            CHECK(loaded.node(i).value == workload.hazard.node(i).value);
        }
    }
}

TEST_CASE("options CSV loads, validates per line, and round-trips") {
    const auto path = write_file("options.csv",
                                 "maturity,frequency,recovery\n5.0,4,0.4\n1.5,12,0.0\n10,1,0.9\n");
    const std::vector<CdsOption> options = load_options(path);
    REQUIRE(options.size() == 3);
    CHECK(options[0].maturity == 5.0);
    CHECK(options[0].payment_frequency == 4);
    CHECK(options[0].recovery_rate == 0.4);
    CHECK(options[2].payment_frequency == 1);

    const auto bad_recovery =
        write_file("bad_recovery.csv", "maturity,frequency,recovery\n5.0,4,1.5\n");
    CHECK_THROWS_WITH_AS(load_options(bad_recovery), doctest::Contains(":2:"), ParseError);
    CHECK_THROWS_WITH_AS(load_options(bad_recovery), doctest::Contains("recovery_rate"),
                         ParseError);

    const auto bad_frequency =
        write_file("bad_frequency.csv", "maturity,frequency,recovery\n5.0,4.5,0.4\n");
    CHECK_THROWS_WITH_AS(load_options(bad_frequency), doctest::Contains("integer"), ParseError);

    const cdsflow::Workload workload = cdsflow::generate_workload(500, 8, 3002);
    for (const char* name : {"options_rt.csv", "options_rt.json"}) {
        cdsflow::save_options(workload.options, scratch_dir() / name);
        const auto loaded = load_options(scratch_dir() / name);
        REQUIRE(loaded.size() == workload.options.size());
        for (std::size_t i = 0; i < loaded.size(); ++i) {
            CHECK(loaded[i].maturity == workload.options[i].maturity);
            CHECK(loaded[i].payment_frequency == workload.options[i].payment_frequency);
            CHECK(loaded[i].recovery_rate == workload.options[i].recovery_rate);
        }
    }
}

TEST_CASE("options JSON validates types and fields") {
    const auto fractional =
        write_file("frac_freq.json", R"([{"maturity": 5.0, "frequency": 4.5, "recovery": 0.4}])");
    CHECK_THROWS_WITH_AS(load_options(fractional), doctest::Contains("integer"), ParseError);

    const auto bad = write_file("bad_option.json",
                                R"([{"maturity": 5.0, "frequency": 4, "recovery": 0.4},
                                    {"maturity": -1.0, "frequency": 4, "recovery": 0.4}])");
    CHECK_THROWS_WITH_AS(load_options(bad), doctest::Contains("element 1"), ParseError);
}

TEST_CASE("results render with 17 significant digits and parse back exactly") {
    cdsflow::SpreadResult result;
    result.option_index = 3;
    result.spread_bps = 119.99918182702322;
    result.legs = {4.3871926296237531, 0.052645989596695125, 0.0065809986995868906};

    std::ostringstream csv;
    cdsflow::write_results({&result, 1}, csv, cdsflow::ResultFormat::Csv);
    std::istringstream in(csv.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "index,spread_bps,premium_pv,payoff_pv,accrual_pv");
    std::getline(in, row);
    std::stringstream fields(row);
    std::string field;
    std::getline(fields, field, ',');
    CHECK(field == "3");
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == result.spread_bps);
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == result.legs.premium_pv);
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == result.legs.payoff_pv);
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == result.legs.accrual_pv);

    std::ostringstream json_out;
    cdsflow::write_results({&result, 1}, json_out, cdsflow::ResultFormat::Json);
    const auto doc = nlohmann::json::parse(json_out.str());
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["index"] == 3);
    CHECK(doc[0]["spread_bps"].get<double>() == result.spread_bps);
    CHECK_FALSE(doc[0].contains("error"));
}

TEST_CASE("failed options appear in the output with their error") {
    cdsflow::SpreadResult failed;
    failed.option_index = 1;
    failed.error = "CdsOption: maturity must be finite and > 0";

    std::ostringstream csv;
    cdsflow::write_results({&failed, 1}, csv, cdsflow::ResultFormat::Csv);
    CHECK(csv.str().find("nan") != std::string::npos);

    std::ostringstream json_out;
    cdsflow::write_results({&failed, 1}, json_out, cdsflow::ResultFormat::Json);
    const auto doc = nlohmann::json::parse(json_out.str());
    CHECK(doc[0]["error"].get<std::string>() == failed.error);
    CHECK(doc[0]["spread_bps"].is_null());  // NaN has no JSON number form
}

TEST_CASE("empty result sets write just the header") {
    std::ostringstream csv;
    cdsflow::write_results({}, csv, cdsflow::ResultFormat::Csv);
    CHECK(csv.str() == "index,spread_bps,premium_pv,payoff_pv,accrual_pv\n");
}

TEST_CASE("generated workloads are deterministic and in range") {
    const cdsflow::Workload a = cdsflow::generate_workload(2000, 1024, 42);
    const cdsflow::Workload b = cdsflow::generate_workload(2000, 1024, 42);

    REQUIRE(a.interest.size() == 1024);
    REQUIRE(a.hazard.size() == 1024);
    REQUIRE(a.options.size() == 2000);
    for (std::size_t i = 0; i < 1024; ++i) {
        CHECK(a.interest.node(i).time == b.interest.node(i).time);
        CHECK(a.interest.node(i).value == b.interest.node(i).value);
        CHECK(a.hazard.node(i).value == b.hazard.node(i).value);
        CHECK(a.interest.node(i).value >= -0.01);
        CHECK(a.interest.node(i).value <= 0.06);
        CHECK(a.hazard.node(i).value >= 0.001);
        CHECK(a.hazard.node(i).value <= 0.08);
    }
    CHECK(a.hazard.times().back() > 29.0);  // nodes span the 30-year horizon

    for (std::size_t i = 0; i < a.options.size(); ++i) {
        CHECK(a.options[i].maturity == b.options[i].maturity);
        CHECK(a.options[i].payment_frequency == b.options[i].payment_frequency);
        CHECK(a.options[i].recovery_rate == b.options[i].recovery_rate);
        CHECK(a.options[i].maturity >= 0.5);
        CHECK(a.options[i].maturity <= 10.0);
        CHECK(a.options[i].recovery_rate >= 0.0);
        CHECK(a.options[i].recovery_rate <= 0.9);
        const int f = a.options[i].payment_frequency;
        CHECK((f == 1 || f == 2 || f == 4 || f == 12));
        CHECK_NOTHROW(a.options[i].validate());
    }

    const cdsflow::Workload c = cdsflow::generate_workload(10, 1024, 43);
    CHECK(c.options[0].maturity != a.options[0].maturity);  // seed actually matters

    CHECK_THROWS_AS(cdsflow::generate_workload(10, 0, 42), std::invalid_argument);
}

TEST_CASE("saving a workload twice produces identical bytes") {
    const cdsflow::Workload workload = cdsflow::generate_workload(200, 64, 3003);
    cdsflow::save_options(workload.options, scratch_dir() / "dup_a.csv");
    cdsflow::save_options(workload.options, scratch_dir() / "dup_b.csv");
    CHECK(read_file(scratch_dir() / "dup_a.csv") == read_file(scratch_dir() / "dup_b.csv"));
    cdsflow::save_term_structure(workload.interest, scratch_dir() / "dup_a.json");
    cdsflow::save_term_structure(workload.interest, scratch_dir() / "dup_b.json");
    CHECK(read_file(scratch_dir() / "dup_a.json") == read_file(scratch_dir() / "dup_b.json"));
}
