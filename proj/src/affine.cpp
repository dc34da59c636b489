#include "vpcalc/affine.hpp"

#include "vpcalc/errors.hpp"

namespace vpcalc {

Affine Affine::operator-() const {
    Affine r;
    r.constant_ = -constant_;
    for (const auto& [v, c] : coeffs_) r.coeffs_[v] = -c;
    return r;
}

Affine operator+(const Affine& a, const Affine& b) {
    Affine r = a;
    r.constant_ += b.constant_;
    for (const auto& [v, c] : b.coeffs_) {
        auto it = r.coeffs_.find(v);
        if (it == r.coeffs_.end()) {
            r.coeffs_[v] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) r.coeffs_.erase(it);
        }
    }
    return r;
}

Affine operator-(const Affine& a, const Affine& b) { return a + (-b); }

Affine Affine::scaled(const Rational& s) const {
    Affine r;
    if (s.is_zero()) return r;
    r.constant_ = constant_ * s;
    for (const auto& [v, c] : coeffs_) r.coeffs_[v] = c * s;
    return r;
}

Affine Affine::substituted(const Var& v, const Affine& e) const {
    auto it = coeffs_.find(v);
    if (it == coeffs_.end()) return *this;
    Rational c = it->second;
    Affine r = *this;
    r.coeffs_.erase(v);
    return r + e.scaled(c);
}

double Affine::eval(const std::map<std::string, double>& assignment) const {
    double r = constant_.to_double();
    for (const auto& [v, c] : coeffs_) {
        auto it = assignment.find(v.name);
        if (it == assignment.end())
            throw Error("unbound variable '" + v.name + "' in affine evaluation");
        r += c.to_double() * it->second;
    }
    return r;
}

std::strong_ordering operator<=>(const Affine& a, const Affine& b) {
    auto ia = a.coeffs_.begin(), ib = b.coeffs_.begin();
    for (; ia != a.coeffs_.end() && ib != b.coeffs_.end(); ++ia, ++ib) {
        if (auto c = ia->first <=> ib->first; c != 0) return c;
        if (auto c = ia->second <=> ib->second; c != 0) return c;
    }
    if (ia != a.coeffs_.end()) return std::strong_ordering::greater;
    if (ib != b.coeffs_.end()) return std::strong_ordering::less;
    return a.constant_ <=> b.constant_;
}

std::string Affine::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    bool first = true;
    auto emit = [&](const Rational& c, const std::string& sym) {
        Rational a = c;
        if (first) {
            if (a.sign() < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a.sign() < 0 ? " - " : " + ";
            a = a.abs();
        }
        first = false;
        if (sym.empty()) {
            out += a.to_string();
        } else {
            if (!a.is_one()) out += a.to_string() + "*";
            out += sym;
        }
    };
    for (const auto& [v, c] : coeffs_) emit(c, v.name);
    if (!constant_.is_zero()) emit(constant_, "");
    return out;
}

std::optional<int> compare_affine(const Affine& a, const Affine& b) {
    Affine d = a - b;
    if (!d.is_constant()) return std::nullopt;
    return d.constant().sign();
}

} // namespace vpcalc
