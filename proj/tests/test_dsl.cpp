#include <doctest.h>

#include <random>

#include "support.hpp"
#include "vpcalc/scenarios.hpp"

using namespace vpcalc;
using tsup::P;

TEST_CASE("parsing the documented examples") {
    DistExpr two_poles = P("VP[1/(x-z1)] * VP[1/(x-z2)]");
    REQUIRE(two_poles.terms.size() == 1);
    REQUIRE(two_poles.terms[0].factors.size() == 2);
    CHECK(two_poles.terms[0].factors[0].is<VPPoleF>());

    DistExpr chain = P("pi^2 * delta(x-z1)*delta(x-z2)");
    REQUIRE(chain.terms.size() == 1);
    CHECK(chain.terms[0].coeff == PiCoeff::pi_squared());
    CHECK(chain.terms[0].factors.size() == 2);
    CHECK(chain.terms[0].factors[0].is<DeltaF>());
}

TEST_CASE("parse errors carry position and expectation") {
    try {
        P("VP[1/(x-");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 8);
        CHECK(!e.expected.empty());
    }
    CHECK_THROWS_AS(P(""), ParseError);
    CHECK_THROWS_AS(P("VP[1/(x-z)^0]"), ParseError);
    CHECK_THROWS_AS(P("2 VP[1/(x-z)]"), ParseError); // no implicit multiplication
}

TEST_CASE("factor grammar coverage") {
    CHECK(P("VP[1/(x-z)^3]").terms[0].factors[0].as<VPPoleF>().degree == 3);
    CHECK(P("delta^(2)(x-z)").terms[0].factors[0].as<DeltaF>().order == 2);
    CHECK(P("log|eta + 1/2*xi - 1|").terms[0].factors[0].is<LogAbsF>());
    CHECK(P("theta(1-z)").terms[0].factors[0].is<HeavisideF>());
    DistExpr u = P("u(x, y)");
    CHECK(u.terms[0].factors[0].is<SmoothF>());
    CHECK(u.terms[0].factors[0].as<SmoothF>().fn->arity() == 2);
    // interned symbolic functions parse to structurally equal factors
    CHECK(factor_equal(P("u(x, y)").terms[0].factors[0], u.terms[0].factors[0]));
    // coefficient sums need parentheses
    DistExpr c = P("(1/3 + 1/2*pi^2) * VP[1/(x-z)]");
    CHECK(c.terms[0].coeff ==
          PiCoeff(Rational(1, 3)) + PiCoeff::pi2(1, Rational(1, 2)));
}

TEST_CASE("printer is a fixed point of parse-then-print") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 500; ++i) {
        DistExpr e = scenarios::random_expr(rng);
        const std::string s = dsl::print_expr(e);
        DistExpr e2 = dsl::parse_expr(s);
        CHECK(dsl::print_expr(e2) == s);
    }
    CHECK(dsl::print_expr(DistExpr::zero()) == "0");
    CHECK(normalize(P("0")).is_zero());
}

TEST_CASE("printed normal forms re-parse to the same normal form") {
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        try {
            DistExpr n = normalize(scenarios::random_expr(rng));
            DistExpr n2 = normalize(dsl::parse_expr(dsl::print_expr(n)));
            CHECK(expr_equal(n, n2));
            ++checked;
        } catch (const Error&) {
        }
    }
    CHECK(checked >= 200);
}
