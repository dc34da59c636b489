#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "vpcalc/rational.hpp"

namespace vpcalc {

/// A named variable. Ordering is lexicographic on the name; the canonical
/// forms of delta chains and pole products depend on this order.
struct Var {
    std::string name;

    Var() = default;
    explicit Var(std::string n) : name(std::move(n)) {}
    friend bool operator==(const Var&, const Var&) = default;
    friend std::strong_ordering operator<=>(const Var& a, const Var& b) {
        return a.name <=> b.name;
    }
};

/// c0 + sum of c_i * v_i with exact rational coefficients.
/// Zero coefficients are never stored.
class Affine {
  public:
    Affine() = default;
    explicit Affine(Rational c) : constant_(std::move(c)) {}
    explicit Affine(std::int64_t c) : constant_(Rational(c)) {}
    explicit Affine(const Var& v) { coeffs_[v] = Rational(1); }

    static Affine var(const std::string& name) { return Affine(Var(name)); }

    const Rational& constant() const { return constant_; }
    const std::map<Var, Rational>& coeffs() const { return coeffs_; }

    bool is_constant() const { return coeffs_.empty(); }
    bool is_zero() const { return coeffs_.empty() && constant_.is_zero(); }

    Rational coeff(const Var& v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }
    bool depends_on(const Var& v) const { return coeffs_.count(v) != 0; }

    /// Lexicographically smallest variable present, if any.
    std::optional<Var> leading_var() const {
        if (coeffs_.empty()) return std::nullopt;
        return coeffs_.begin()->first;
    }

    std::set<Var> vars() const {
        std::set<Var> s;
        for (const auto& [v, c] : coeffs_) s.insert(v);
        return s;
    }

    Affine operator-() const;
    friend Affine operator+(const Affine& a, const Affine& b);
    friend Affine operator-(const Affine& a, const Affine& b);
    Affine scaled(const Rational& s) const;
    Affine& operator+=(const Affine& o) { return *this = *this + o; }
    Affine& operator-=(const Affine& o) { return *this = *this - o; }

    /// Replace v by the affine expression e.
    Affine substituted(const Var& v, const Affine& e) const;

    double eval(const std::map<std::string, double>& assignment) const;

    friend bool operator==(const Affine& a, const Affine& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }
    friend std::strong_ordering operator<=>(const Affine& a, const Affine& b);

    /// Variables in lexicographic order, constant last: "x - z1", "-x + z + 2".
    std::string to_string() const;

  private:
    Rational constant_;
    std::map<Var, Rational> coeffs_;
};

inline Affine operator-(const Var& a, const Var& b) { return Affine(a) - Affine(b); }

/// Sign of a - b when the difference is a constant; nullopt otherwise.
std::optional<int> compare_affine(const Affine& a, const Affine& b);

} // namespace vpcalc
