#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "crossnet/rng.hpp"

using namespace crossnet;

TEST_CASE("uniform sample mean obeys the law-of-large-numbers bound") {
    Rng rng(7);
    const Vector v = sample_uniform(rng, -1.0, 1.0, 10000);
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    CHECK(mean > -0.05);
    CHECK(mean < 0.05);
    for (const double x : v) {
        CHECK(x >= -1.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("gaussian with zero stddev is the mean") {
    Rng rng(1);
    const Vector v = sample_gaussian(rng, 2.5, 0.0, 100);
    for (const double x : v) CHECK(x == 2.5);
}

TEST_CASE("gaussian sample moments") {
    Rng rng(42);
    const Vector v = sample_gaussian(rng, 1.0, 2.0, 20000);
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (const double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    CHECK(std::abs(mean - 1.0) < 0.1);
    CHECK(std::abs(std::sqrt(var) - 2.0) < 0.1);
}

TEST_CASE("same seed gives identical streams") {
    Rng a(99), b(99);
    const Vector va = sample_uniform(a, -1.0, 1.0, 64);
    const Vector vb = sample_uniform(b, -1.0, 1.0, 64);
    CHECK(va == vb);
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("split streams differ from the parent") {
    Rng a(5);
    Rng c = a.split();
    const Vector va = sample_uniform(a, 0.0, 1.0, 16);
    Rng a2(5);
    Rng c2 = a2.split();
    const Vector vc = sample_uniform(c, 0.0, 1.0, 16);
    const Vector vc2 = sample_uniform(c2, 0.0, 1.0, 16);
    CHECK(vc == vc2);  // deterministic derivation
    CHECK(va != vc);
}

TEST_CASE("below covers the range and rejects zero") {
    Rng rng(13);
    bool seen[5] = {false, false, false, false, false};
    for (int i = 0; i < 1000; ++i) seen[rng.below(5)] = true;
    for (const bool s : seen) CHECK(s);
    CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("invalid ranges are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(rng.uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_uniform(rng, 2.0, -2.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(sample_gaussian(rng, 0.0, -1.0, 4), std::invalid_argument);
}

TEST_CASE("truncated gaussian respects the clip") {
    Rng rng(8);
    for (int i = 0; i < 5000; ++i) CHECK(std::abs(rng.truncated_gaussian(0.5, 2.0)) <= 1.0);
}
