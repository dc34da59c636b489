#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vpcalc/quadrature.hpp"
#include "vpcalc/scenarios.hpp"

using namespace vpcalc;
using namespace vpcalc::scenarios;

namespace {
const double kPi2 = 9.869604401089358;
}

TEST_CASE("cube determination of the delta-chain constant") {
    auto reports = cube_c2_determination();
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
        INFO(r.name << ": " << r.computed << " vs " << r.expected);
        CHECK(r.passed);
    }
    CHECK(reports[0].computed == doctest::Approx(kPi2 / 3.0).epsilon(1e-6));
    CHECK(reports[1].computed == doctest::Approx(-2.0 * kPi2 / 3.0).epsilon(1e-6));
    CHECK(reports[2].computed == doctest::Approx(kPi2).epsilon(1e-5));
}

TEST_CASE("simplex closed forms") {
    CHECK(simplex_route_b(1.0) == doctest::Approx(-kPi2 / 3.0).epsilon(1e-12));
    for (double z : {0.25, 0.5, 1.0, 2.0, 5.0})
        CHECK(std::abs(simplex_route_a(z) - simplex_route_b(z)) < 1e-10);
    // below threshold only route B applies: I(-1/2) = pi^2/3 + ln^2 2
    const double l2 = std::log(2.0);
    CHECK(simplex_route_b(-0.5) ==
          doctest::Approx(kPi2 / 3.0 + l2 * l2).epsilon(1e-12));
    CHECK_THROWS_AS(simplex_route_a(-0.5), DomainError);
    CHECK_THROWS_AS(simplex_route_b(0.0), ThresholdUndefined);
}

TEST_CASE("simplex one-sided limits at the threshold") {
    CHECK_THROWS_AS(simplex_I(0.0, Route::B, false), ThresholdUndefined);
    auto reports = simplex_I(0.0, Route::B, true);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.passed);
    CHECK(reports[2].computed == doctest::Approx(-kPi2).epsilon(1e-9));
}

TEST_CASE("simplex pipeline and oracle agree with the closed forms") {
    for (double z : {0.5, 2.0}) {
        const double ref = simplex_route_b(z);
        CHECK(std::abs(simplex_pipeline(z) - ref) < 1e-6);
        CHECK(std::abs(simplex_oracle(z) - ref) < 1e-6);
    }
    // below the threshold the delta chain stops contributing
    const double zneg = -0.5;
    CHECK(std::abs(simplex_pipeline(zneg) - simplex_route_b(zneg)) < 1e-6);
    CHECK(std::abs(simplex_oracle(zneg) - simplex_route_b(zneg)) < 1e-6);
}

TEST_CASE("report rendering is deterministic") {
    auto r1 = cube_c2_determination();
    auto r2 = cube_c2_determination();
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].name == r2[i].name);
        CHECK(r1[i].computed == r2[i].computed); // bit-stable numerics
    }
    // CSV numbers render with 15 significant digits
    auto csv = to_csv(r1);
    CHECK(csv.find("name,computed,expected,abs_error,passed,runtime_ms") == 0);
    CHECK(to_text(r1).find("PASS") != std::string::npos);
}
