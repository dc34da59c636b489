#include <doctest.h>

#include "support.hpp"
#include "vpcalc/affine.hpp"

using namespace vpcalc;
using tsup::A;

TEST_CASE("affine arithmetic and normalization") {
    Affine a = A("x - z1");
    Affine b = A("2 + z1 - x");
    CHECK((a + b) == A("2"));
    CHECK((a + b).is_constant());
    CHECK(a.coeff(Var("x")) == Rational(1));
    CHECK(a.coeff(Var("z1")) == Rational(-1));
    CHECK(a.leading_var() == Var("x"));
    CHECK(A("eta + 1/2*xi - 1").coeff(Var("xi")) == Rational(1, 2));
    CHECK((-a) == A("z1 - x"));
    CHECK(a.scaled(Rational(-2)) == A("2*z1 - 2*x"));
}

TEST_CASE("affine substitution and evaluation") {
    Affine a = A("x - z1");
    CHECK(a.substituted(Var("x"), A("z2")) == A("z2 - z1"));
    CHECK(a.substituted(Var("y"), A("z2")) == a);
    CHECK(a.eval({{"x", 3.0}, {"z1", 1.0}}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(a.eval({{"x", 3.0}}), Error);
}

TEST_CASE("affine comparison is a total order") {
    CHECK(A("x") < A("x + 1"));
    CHECK(A("x") < A("z1"));
    CHECK(compare_affine(A("x + 1"), A("x")) == 1);
    CHECK(compare_affine(A("x"), A("z1")) == std::nullopt);
    CHECK(compare_affine(A("2 + z - x"), A("z - x")) == 1);
}

TEST_CASE("affine printing round-trips") {
    for (const char* s : {"x - z1", "2 + z - x", "eta + 1/2*xi - 1", "-1/2*xi", "3/4"}) {
        Affine a = A(s);
        CHECK(A(a.to_string()) == a);
    }
}
