#include <doctest.h>

#include "vpcalc/rational.hpp"

using vpcalc::BigInt;
using vpcalc::Rational;

TEST_CASE("rational normalization") {
    Rational r(6, -4);
    CHECK(r.numerator() == -3);
    CHECK(r.denominator() == 2);
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(0).denominator() == 1);
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK_THROWS_AS(Rational(1, 0), vpcalc::DomainError);
}

TEST_CASE("rational arithmetic and order") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a - b == Rational(1, 6));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(a > b);
    CHECK(Rational(-1, 2) < Rational(1, 3));
    CHECK(Rational(-3, 2).abs() == Rational(3, 2));
    CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
    CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
    CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("factorials and binomials stay exact at high degree") {
    CHECK(Rational::factorial(25).to_string() == "15511210043330985984000000");
    CHECK(Rational::binomial(40, 20).to_string() == "137846528820");
    CHECK(Rational::binomial(5, -1) == Rational(0));
    CHECK(Rational::binomial(5, 7) == Rational(0));
}

TEST_CASE("rational printing") {
    CHECK(Rational(-5, 10).to_string() == "-1/2");
    CHECK(Rational(4, 2).to_string() == "2");
}
