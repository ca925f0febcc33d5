#include "cdsflow/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "support/reference.hpp"

using cdsflow::LaneAccumulator;
using cdsflow::strided_sum;
using cdsflow::strided_weighted_sum;
using cdsflow::WeightedValue;

TEST_CASE("lane accumulator rejects bad lane counts") {
    CHECK_THROWS_AS(LaneAccumulator(0), std::invalid_argument);
    CHECK_THROWS_AS(LaneAccumulator(cdsflow::kMaxLanes + 1), std::invalid_argument);
    CHECK_THROWS_AS(strided_sum(std::vector<double>{1.0}, 0), std::invalid_argument);
    CHECK(LaneAccumulator(1).lanes() == 1);
    CHECK(LaneAccumulator(cdsflow::kMaxLanes).lanes() == cdsflow::kMaxLanes);
}

TEST_CASE("small exact sums") {
    std::vector<double> values;
    for (int i = 0; i < 10; ++i) values.push_back(static_cast<double>(i));
    CHECK(strided_sum(values, 7) == 45.0);  // integers sum exactly in any order
    CHECK(strided_sum({}, 7) == 0.0);
    CHECK(strided_sum({}, 1) == 0.0);
    CHECK(strided_sum(std::vector<double>{2.5}, 16) == 2.5);
}

TEST_CASE("one lane is bit-identical to the naive left fold") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = rng() % 2000;
        std::vector<double> values(n);
        for (double& v : values) v = testref::uniform(rng, -1.0, 1.0);
        if (n > 0 && rep % 3 == 0) values[rng() % n] = -0.0;  // signed zero must survive too
        const double naive = testref::naive_sum(values);
        const double strided = strided_sum(values, 1);
        CHECK(std::signbit(strided) == std::signbit(naive));
        CHECK(strided == naive);
    }
}

TEST_CASE("strided sum matches naive within the reordering bound") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = rng() % 2000;
        const unsigned lanes = 1 + static_cast<unsigned>(rng() % 16);
        std::vector<double> values(n);
        for (double& v : values) v = testref::uniform(rng, -1.0, 1.0);
        const double naive = testref::naive_sum(values);
        const double strided = strided_sum(values, lanes);
        CHECK(std::fabs(strided - naive) <= 1e-12 * testref::abs_sum(values) + 1e-300);
    }
}

TEST_CASE("fixed 1e4-element vector stays within 1e-12 of naive") {
    std::mt19937_64 rng(20260815);
    std::vector<double> values(10000);
    for (double& v : values) v = testref::uniform(rng, -1.0, 1.0);
    const double naive = testref::naive_sum(values);
    REQUIRE(std::fabs(naive) > 1.0);  // seed chosen so the relative bound is well-posed
    const double strided = strided_sum(values, 7);
    CHECK(std::fabs(strided - naive) <= 1e-12 * std::fabs(naive));
}

TEST_CASE("input permutation stays within the same bound of naive") {
    std::mt19937_64 rng(13);
    std::vector<double> values(5000);
    for (double& v : values) v = testref::uniform(rng, -1.0, 1.0);
    const double naive = testref::naive_sum(values);
    const double bound = 1e-12 * testref::abs_sum(values) + 1e-300;
    CHECK(std::fabs(strided_sum(values, 7) - naive) <= bound);
    std::shuffle(values.begin(), values.end(), rng);
    CHECK(std::fabs(strided_sum(values, 7) - naive) <= bound);
}

TEST_CASE("uneven lengths cover every lane-remainder case") {
    for (unsigned lanes = 1; lanes <= 16; ++lanes) {
        for (std::size_t n = 0; n <= 2 * lanes + 1; ++n) {
            std::vector<double> values(n, 1.0);
            CHECK(strided_sum(values, lanes) == static_cast<double>(n));
        }
    }
}

TEST_CASE("weighted sum") {
    CHECK(strided_weighted_sum({}, 7) == 0.0);
    std::vector<WeightedValue> quarters(4, WeightedValue{0.25, 0.02});
    CHECK(std::fabs(strided_weighted_sum(quarters, 7) - 0.02) <= 1e-15);

    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = rng() % 1000;
        const unsigned lanes = 1 + static_cast<unsigned>(rng() % 16);
        std::vector<WeightedValue> terms(n);
        std::vector<double> products(n);
        for (std::size_t i = 0; i < n; ++i) {
            terms[i] = {testref::uniform(rng, 0.0, 2.0), testref::uniform(rng, -1.0, 1.0)};
            products[i] = terms[i].weight * terms[i].value;
        }
        const double naive = testref::naive_weighted_sum(terms);
        const double strided = strided_weighted_sum(terms, lanes);
        CHECK(std::fabs(strided - naive) <= 1e-12 * testref::abs_sum(products) + 1e-300);
        CHECK(strided_weighted_sum(terms, 1) == naive);
    }
}
