#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cellcast/quantizer.hpp"
#include "cellcast/rng.hpp"
#include "cellcast/series.hpp"
#include "test_support.hpp"

using namespace cellcast;
using cellcast::testing::make_grid;

namespace {
SeriesGrid tiny_grid(std::vector<std::vector<std::optional<double>>> rows) {
    return make_grid(rows);
}
} // namespace

TEST_CASE("fit_range uses the observed maximum") {
    const auto grid = tiny_grid({{10.0, 90.0}, {0.0, std::nullopt}});
    const auto spec = fit_range(grid, 10);
    CHECK(spec.base_range == 90.0);
    CHECK(spec.num_states == 10);
}

TEST_CASE("fit_range on an all-zero corpus falls back to range 1") {
    const auto grid = tiny_grid({{0.0, 0.0, 0.0}});
    const auto spec = fit_range(grid, 10);
    CHECK(spec.base_range == 1.0);
    CHECK(quantize(0.0, 1, spec) == 0);
}

TEST_CASE("fit_range error cases") {
    const auto all_gap = tiny_grid({{std::nullopt, std::nullopt}});
    CHECK_THROWS_WITH(fit_range(all_gap, 10), "empty corpus");
    const auto negative = tiny_grid({{1.0, -1.0}});
    CHECK_THROWS_WITH(fit_range(negative, 10), "negative measurement");
}

TEST_CASE("quantize boundary behavior") {
    const QuantizerSpec spec(10, 90.0);
    CHECK(quantize(0.0, 1, spec) == 0);
    CHECK(quantize(5.0, 1, spec) == 1);
    CHECK(quantize(90.0, 1, spec) == 9);
    CHECK(quantize(95.0, 1, spec) == 9); // clamps above the range
    CHECK(quantize(10.0, 1, spec) == 1); // right-closed interval (0,10]
    CHECK(quantize(10.0000001, 1, spec) == 2);
    CHECK_THROWS(quantize(-1.0, 1, spec));
    CHECK_THROWS(quantize(std::nan(""), 1, spec));
    CHECK_THROWS(quantize(5.0, 0, spec));
}

TEST_CASE("quantize of a sum scales the range by the number of summands") {
    const QuantizerSpec spec(10, 90.0);
    // z=3: range 270, width 30, 75 lies in (60, 90]
    CHECK(quantize(75.0, 3, spec) == 3);
}

TEST_CASE("representative returns interval midpoints") {
    const QuantizerSpec spec(10, 90.0);
    CHECK(representative(0, 1, spec) == 0.0);
    CHECK(representative(3, 1, spec) == doctest::Approx(25.0));
    CHECK_THROWS(representative(10, 1, spec));
    CHECK_THROWS(representative(-1, 1, spec));
}

TEST_CASE("round trip: quantize(representative(k)) == k for every state and scale") {
    for (int s : {2, 3, 10, 17}) {
        const QuantizerSpec spec(s, 90.0);
        for (int z : {1, 2, 3, 7}) {
            for (State k = 0; k < s; ++k)
                CHECK(quantize(representative(k, z, spec), z, spec) == k);
        }
    }
}

TEST_CASE("quantize is monotone nondecreasing") {
    const QuantizerSpec spec(10, 90.0);
    Rng rng(7);
    for (int it = 0; it < 2000; ++it) {
        const int z = static_cast<int>(rng.uniform_int(1, 4));
        double a = rng.uniform() * 100.0 * z;
        double b = rng.uniform() * 100.0 * z;
        if (a > b) std::swap(a, b);
        CHECK(quantize(a, z, spec) <= quantize(b, z, spec));
    }
}

TEST_CASE("quantized values stay inside the state set") {
    const QuantizerSpec spec(6, 12.5);
    Rng rng(8);
    for (int it = 0; it < 2000; ++it) {
        const int z = static_cast<int>(rng.uniform_int(1, 5));
        const State k = quantize(rng.uniform() * 40.0 * z, z, spec);
        CHECK(k >= 0);
        CHECK(k < 6);
    }
    CHECK(quantize(1000.0, 1, spec) == 5);
}

TEST_CASE("scaling property away from interval boundaries") {
    const QuantizerSpec spec(10, 90.0);
    Rng rng(9);
    const double width = 90.0 / 9.0;
    for (int it = 0; it < 2000; ++it) {
        const int z = static_cast<int>(rng.uniform_int(1, 4));
        const int k = static_cast<int>(rng.uniform_int(0, 8));
        // a point strictly inside interval (k*w, (k+1)*w], away from both ends
        const double unit = (k + 0.1 + 0.8 * rng.uniform()) * width;
        CHECK(quantize(unit * z, z, spec) == quantize(unit, 1, spec));
    }
}

TEST_CASE("plain discretization when zero is not special") {
    const QuantizerSpec spec(4, 8.0, false); // widths of 2 over [0, 8]
    CHECK(quantize(0.0, 1, spec) == 0);
    CHECK(quantize(1.5, 1, spec) == 0);
    CHECK(quantize(2.5, 1, spec) == 1);
    CHECK(quantize(8.0, 1, spec) == 3);
    CHECK(quantize(9.0, 1, spec) == 3);
    for (State k = 0; k < 4; ++k)
        CHECK(quantize(representative(k, 1, spec), 1, spec) == k);
}
