#include "vpcalc/pi_coeff.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace vpcalc {

bool PiCoeff::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_one();
}

bool PiCoeff::is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

Rational PiCoeff::rational_part() const { return coeff(0); }

Rational PiCoeff::coeff(int k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Rational(0) : it->second;
}

PiCoeff PiCoeff::operator-() const {
    PiCoeff r;
    for (const auto& [k, c] : terms_) r.terms_[k] = -c;
    return r;
}

PiCoeff operator+(const PiCoeff& a, const PiCoeff& b) {
    PiCoeff r = a;
    for (const auto& [k, c] : b.terms_) {
        auto it = r.terms_.find(k);
        if (it == r.terms_.end()) {
            r.terms_[k] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms_.erase(it);
        }
    }
    return r;
}

PiCoeff operator-(const PiCoeff& a, const PiCoeff& b) { return a + (-b); }

PiCoeff operator*(const PiCoeff& a, const PiCoeff& b) {
    PiCoeff r;
    for (const auto& [ka, ca] : a.terms_) {
        for (const auto& [kb, cb] : b.terms_) {
            Rational c = ca * cb;
            auto it = r.terms_.find(ka + kb);
            if (it == r.terms_.end()) {
                if (!c.is_zero()) r.terms_[ka + kb] = std::move(c);
            } else {
                it->second += c;
                if (it->second.is_zero()) r.terms_.erase(it);
            }
        }
    }
    return r;
}

std::strong_ordering operator<=>(const PiCoeff& a, const PiCoeff& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
        if (auto c = ia->first <=> ib->first; c != 0) return c;
        if (auto c = ia->second <=> ib->second; c != 0) return c;
    }
    if (ia != a.terms_.end()) return std::strong_ordering::greater;
    if (ib != b.terms_.end()) return std::strong_ordering::less;
    return std::strong_ordering::equal;
}

double PiCoeff::to_double() const {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double r = 0.0;
    for (const auto& [k, c] : terms_) r += c.to_double() * std::pow(pi2, k);
    return r;
}

std::string PiCoeff::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
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
        if (k == 0) {
            out += a.to_string();
        } else {
            if (!a.is_one()) out += a.to_string() + "*";
            out += "pi^" + std::to_string(2 * k);
        }
    }
    return out;
}

namespace {

struct CoeffScanner {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError("coefficient parse error at offset " + std::to_string(pos), 1,
                         static_cast<int>(pos) + 1, expected);
    }

    BigInt integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("integer");
        return BigInt(s.substr(start, pos - start));
    }

    Rational rational() {
        BigInt n = integer();
        if (consume('/')) return Rational(std::move(n), integer());
        return Rational(std::move(n));
    }

    // monomial := rational ('*' 'pi^' even)? | 'pi^' even
    void monomial(PiCoeff& acc, bool negate) {
        Rational c(1);
        bool have_rat = false;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            c = rational();
            have_rat = true;
        }
        int k = 0;
        bool have_pi = false;
        size_t save = pos;
        if ((!have_rat || consume('*')) && consume('p')) {
            if (!consume('i') || !consume('^')) fail("pi^<even power>");
            BigInt e = integer();
            if (e <= 0 || e % 2 != 0) fail("even positive pi power");
            k = e.convert_to<int>() / 2;
            have_pi = true;
        } else if (have_rat) {
            pos = save;
        }
        if (!have_rat && !have_pi) fail("rational or pi^2k");
        if (negate) c = -c;
        acc += PiCoeff::pi2(k, c);
    }
};

} // namespace

PiCoeff PiCoeff::parse(const std::string& text) {
    CoeffScanner sc{text};
    PiCoeff acc;
    bool neg = sc.consume('-');
    if (!neg) sc.consume('+');
    sc.monomial(acc, neg);
    while (!sc.eof()) {
        if (sc.consume('+')) {
            sc.monomial(acc, false);
        } else if (sc.consume('-')) {
            sc.monomial(acc, true);
        } else {
            sc.fail("'+' or '-'");
        }
    }
    return acc;
}

PiCoeff coeff_add(const PiCoeff& a, const PiCoeff& b) { return a + b; }
PiCoeff coeff_mul(const PiCoeff& a, const PiCoeff& b) { return a * b; }
double coeff_to_float(const PiCoeff& a) { return a.to_double(); }

} // namespace vpcalc
