#pragma once

#include <random>
#include <string>
#include <vector>

#include "vpcalc/expr.hpp"

namespace vpcalc::scenarios {

struct ScenarioReport {
    std::string name;
    double computed = 0.0;
    double expected = 0.0;
    std::string expected_repr;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double runtime_ms = 0.0;
    std::string note;
};

struct VerifyOptions {
    unsigned long seed = 20240817;
    double tol_scale = 1.0; // scales every tolerance; < 1 tightens
    bool include_slow = true; // the four-pole cube comparison
};

/// The unit-cube determination of the delta-chain coefficient: the
/// regular-order triple integral, the bracket-term triple integral, and the
/// inferred constant, all against the brute-force oracle.
std::vector<ScenarioReport> cube_c2_determination(double tol = 1e-6);

enum class Route { A, B, Both };

/// The simplex integral I(z) by the requested route(s); with Route::Both the
/// symbolic pipeline and the numeric oracle are reported as well.
/// z = 0 throws ThresholdUndefined unless one_sided is set, in which case the
/// one-sided limits are reported instead.
std::vector<ScenarioReport> simplex_I(double z, Route route, bool one_sided = false);

/// Everything: runs every acceptance check with deterministic naming and
/// ordering. Failures are reported, never thrown.
std::vector<ScenarioReport> verify_suite(const VerifyOptions& opts = {});

std::string to_csv(const std::vector<ScenarioReport>& reports);
std::string to_text(const std::vector<ScenarioReport>& reports);

// Closed forms and oracles used by the scenarios (also exercised directly in
// tests and by the CLI scan command).
double simplex_route_a(double z); // 2 dilog(1 + 1/z) + ln^2 z - pi^2/6, z > 0
double simplex_route_b(double z); // -2 dilog(1 + z) + pi^2/2 - pi^2 theta(z), z > -1
double simplex_pipeline(double z, double quad_tol = 1e-9);
double simplex_oracle(double z, double tol = 1e-8);

/// Random expression over a small variable pool (grammar-printable factors
/// only); used by the randomized property suites.
DistExpr random_expr(std::mt19937_64& rng, int max_terms = 4);

} // namespace vpcalc::scenarios
