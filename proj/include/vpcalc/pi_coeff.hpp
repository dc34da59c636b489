#pragma once

#include <compare>
#include <map>
#include <string>

#include "vpcalc/rational.hpp"

namespace vpcalc {

/// Exact coefficient in the ring Q[pi^2]: a rational polynomial in pi^2.
/// Stored as a map from the power of pi^2 to its rational coefficient;
/// zero entries are never stored, the empty map is the zero coefficient.
class PiCoeff {
  public:
    PiCoeff() = default;
    PiCoeff(std::int64_t n) { set(0, Rational(n)); } // NOLINT(google-explicit-constructor)
    PiCoeff(Rational r) { set(0, std::move(r)); }    // NOLINT(google-explicit-constructor)

    /// c * (pi^2)^k
    static PiCoeff pi2(int k, Rational c = Rational(1)) {
        PiCoeff p;
        p.set(k, std::move(c));
        return p;
    }

    static PiCoeff pi_squared() { return pi2(1); }
    static PiCoeff pi_fourth() { return pi2(2); }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    bool is_rational() const; // no pi^2 powers
    Rational rational_part() const;
    const std::map<int, Rational>& terms() const { return terms_; }

    /// Coefficient of (pi^2)^k (zero if absent).
    Rational coeff(int k) const;

    PiCoeff operator-() const;
    friend PiCoeff operator+(const PiCoeff& a, const PiCoeff& b);
    friend PiCoeff operator-(const PiCoeff& a, const PiCoeff& b);
    friend PiCoeff operator*(const PiCoeff& a, const PiCoeff& b);
    PiCoeff& operator+=(const PiCoeff& o) { return *this = *this + o; }
    PiCoeff& operator-=(const PiCoeff& o) { return *this = *this - o; }
    PiCoeff& operator*=(const PiCoeff& o) { return *this = *this * o; }

    friend bool operator==(const PiCoeff& a, const PiCoeff& b) { return a.terms_ == b.terms_; }
    friend std::strong_ordering operator<=>(const PiCoeff& a, const PiCoeff& b);

    double to_double() const;

    /// "1/3 + 2*pi^2 + 1/2*pi^4"; "0" for zero. Lossless round-trip with parse().
    std::string to_string() const;
    static PiCoeff parse(const std::string& text);

  private:
    void set(int k, Rational c) {
        if (!c.is_zero()) terms_[k] = std::move(c);
    }

    std::map<int, Rational> terms_;
};

PiCoeff coeff_add(const PiCoeff& a, const PiCoeff& b);
PiCoeff coeff_mul(const PiCoeff& a, const PiCoeff& b);
double coeff_to_float(const PiCoeff& a);

} // namespace vpcalc
