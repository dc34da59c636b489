#include <doctest.h>

#include <random>

#include "vpcalc/pi_coeff.hpp"

using vpcalc::PiCoeff;
using vpcalc::Rational;

TEST_CASE("coefficient ring examples") {
    const PiCoeff pi2 = PiCoeff::pi_squared();
    CHECK(PiCoeff::pi2(1, Rational(1, 3)) + PiCoeff::pi2(1, Rational(2, 3)) == pi2);
    CHECK((pi2 + (-pi2)).is_zero());
    // regular-order cube value reconstruction: pi^2/3 - 2 pi^2/3 + pi^2 = 2/3 pi^2
    CHECK(PiCoeff::pi2(1, Rational(1, 3)) + PiCoeff::pi2(1, Rational(-2, 3)) + pi2 ==
          PiCoeff::pi2(1, Rational(2, 3)));
    CHECK(pi2 * pi2 == PiCoeff::pi_fourth());
    CHECK(PiCoeff(Rational(1, 2)) * pi2 == PiCoeff::pi2(1, Rational(1, 2)));
    CHECK(PiCoeff(-1) * PiCoeff::pi2(1, Rational(1, 3)) == PiCoeff::pi2(1, Rational(-1, 3)));
}

TEST_CASE("coefficient to float") {
    CHECK(PiCoeff::pi_squared().to_double() ==
          doctest::Approx(9.869604401089358).epsilon(1e-15));
    CHECK(PiCoeff().to_double() == 0.0);
    CHECK(PiCoeff::pi2(1, Rational(1, 3)).to_double() ==
          doctest::Approx(3.289868133696453).epsilon(1e-15));
}

TEST_CASE("addition commutes with to_double within rounding") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(-99, 99);
    std::uniform_int_distribution<int> den(1, 30);
    std::uniform_int_distribution<int> pw(0, 3);
    for (int i = 0; i < 1000; ++i) {
        PiCoeff a = PiCoeff::pi2(pw(rng), Rational(num(rng), den(rng)));
        PiCoeff b = PiCoeff::pi2(pw(rng), Rational(num(rng), den(rng)));
        const double lhs = (a + b).to_double();
        const double rhs = a.to_double() + b.to_double();
        CHECK(std::abs(lhs - rhs) <= 1e-14 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("coefficient text round-trip") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-99, 99);
    std::uniform_int_distribution<int> den(1, 30);
    std::uniform_int_distribution<int> pw(0, 3);
    for (int i = 0; i < 500; ++i) {
        PiCoeff a;
        for (int k = 0; k < 3; ++k) a += PiCoeff::pi2(pw(rng), Rational(num(rng), den(rng)));
        CHECK(PiCoeff::parse(a.to_string()) == a);
    }
    CHECK(PiCoeff::parse("0").is_zero());
    CHECK(PiCoeff::parse("pi^2") == PiCoeff::pi_squared());
    CHECK(PiCoeff::parse("1/3 + 2*pi^2 + 1/2*pi^4") ==
          PiCoeff(Rational(1, 3)) + PiCoeff::pi2(1, Rational(2)) +
              PiCoeff::pi2(2, Rational(1, 2)));
    CHECK_THROWS_AS(PiCoeff::parse("pi^3"), vpcalc::ParseError);
}
