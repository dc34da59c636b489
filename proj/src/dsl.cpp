#include "vpcalc/dsl.hpp"

#include <cctype>
#include <mutex>

#include "vpcalc/errors.hpp"

namespace vpcalc::dsl {

namespace {

class SymbolicFn final : public SmoothFn {
  public:
    SymbolicFn(std::string name, int arity) : name_(std::move(name)), arity_(arity) {}
    int arity() const override { return arity_; }
    double eval(std::span<const double>) const override {
        throw Error("test function '" + name_ + "' is symbolic; bind a callable to evaluate");
    }
    std::string name() const override { return name_; }
    bool equals(const SmoothFn& other) const override {
        if (auto* s = dynamic_cast<const SymbolicFn*>(&other))
            return s->name_ == name_ && s->arity_ == arity_;
        return false;
    }

  private:
    std::string name_;
    int arity_;
};

struct Scanner {
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
    bool consume_word(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) == 0) {
            // keywords followed by an identifier character are identifiers
            size_t end = pos + w.size();
            if (end < s.size() &&
                (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
                return false;
            pos = end;
            return true;
        }
        return false;
    }
    bool lookahead_word(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) != 0) return false;
        size_t end = pos + w.size();
        return !(end < s.size() &&
                 (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'));
    }

    [[noreturn]] void fail(const std::string& expected) {
        skip_ws();
        // 1-based column; unexpected end of input points at the last character
        int col = static_cast<int>(pos >= s.size() ? (s.empty() ? 1 : s.size()) : pos + 1);
        std::string what = pos >= s.size() ? "unexpected end of input" : "unexpected input";
        throw ParseError(what + " at column " + std::to_string(col) + "; expected " + expected, 1,
                         col, expected);
    }

    BigInt integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("integer");
        return BigInt(s.substr(start, pos - start));
    }

    int small_int() {
        BigInt v = integer();
        if (v > 1000000) fail("small integer");
        return v.convert_to<int>();
    }

    Rational rational() {
        BigInt n = integer();
        if (consume('/')) return Rational(std::move(n), integer());
        return Rational(std::move(n));
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() &&
            (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            ++pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
        }
        if (pos == start) fail("identifier");
        return s.substr(start, pos - start);
    }
};

class Parser {
  public:
    Parser(const std::string& src, const Context& ctx) : sc_{src}, ctx_(ctx) {}

    DistExpr expr() {
        DistExpr e;
        bool neg = sc_.consume('-');
        if (!neg) sc_.consume('+');
        append_term(e, neg);
        while (!sc_.eof()) {
            if (sc_.consume('+')) {
                append_term(e, false);
            } else if (sc_.consume('-')) {
                append_term(e, true);
            } else {
                sc_.fail("'+' or '-'");
            }
        }
        return e;
    }

    Affine affine_expr() {
        Affine a = affine();
        if (!sc_.eof()) sc_.fail("end of input");
        return a;
    }

  private:
    Scanner sc_;
    const Context& ctx_;

    bool starts_coeff() {
        char c = sc_.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '(') return true;
        return sc_.lookahead_word("pi");
    }

    void append_term(DistExpr& e, bool negate) {
        DistTerm t;
        t.coeff = PiCoeff(1);
        bool have_any = false;
        if (starts_coeff()) {
            t.coeff = coeff();
            have_any = true;
        } else {
            t.factors.push_back(factor());
            have_any = true;
        }
        while (true) {
            size_t save = sc_.pos;
            if (!sc_.consume('*')) break;
            if (sc_.eof()) {
                sc_.pos = save;
                sc_.fail("factor after '*'");
            }
            t.factors.push_back(factor());
        }
        if (!have_any) sc_.fail("term");
        if (negate) t.coeff = -t.coeff;
        e.terms.push_back(std::move(t));
    }

    PiCoeff coeff() {
        if (sc_.consume('(')) {
            PiCoeff acc;
            bool neg = sc_.consume('-');
            if (!neg) sc_.consume('+');
            acc += catom(neg);
            while (!sc_.consume(')')) {
                if (sc_.consume('+')) {
                    acc += catom(false);
                } else if (sc_.consume('-')) {
                    acc += catom(true);
                } else {
                    sc_.fail("'+', '-' or ')'");
                }
            }
            return acc;
        }
        return catom(false);
    }

    PiCoeff catom(bool negate) {
        Rational r(1);
        bool have_rat = false;
        if (std::isdigit(static_cast<unsigned char>(sc_.peek()))) {
            r = sc_.rational();
            have_rat = true;
        }
        int k = 0;
        bool have_pi = false;
        size_t save = sc_.pos;
        bool star = true;
        if (have_rat) star = sc_.consume('*');
        if (star && sc_.consume_word("pi")) {
            if (!sc_.consume('^')) sc_.fail("'^' after pi");
            int e = sc_.small_int();
            if (e <= 0 || e % 2 != 0) sc_.fail("even positive power of pi");
            k = e / 2;
            have_pi = true;
        } else if (have_rat) {
            sc_.pos = save;
        }
        if (!have_rat && !have_pi) sc_.fail("coefficient");
        if (negate) r = -r;
        return PiCoeff::pi2(k, r);
    }

    Affine affine() {
        Affine a;
        bool neg = sc_.consume('-');
        if (!neg) sc_.consume('+');
        a += aterm(neg);
        while (true) {
            if (sc_.consume('+')) {
                a += aterm(false);
            } else if (sc_.consume('-')) {
                a += aterm(true);
            } else {
                break;
            }
        }
        return a;
    }

    Affine aterm(bool negate) {
        char c = sc_.peek();
        Affine a;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rational r = sc_.rational();
            if (sc_.consume('*')) {
                a = Affine(Var(sc_.ident())).scaled(r);
            } else {
                a = Affine(r);
            }
        } else {
            a = Affine(Var(sc_.ident()));
        }
        return negate ? -a : a;
    }

    Factor factor() {
        if (sc_.consume_word("VP")) {
            if (!sc_.consume('[')) sc_.fail("'[' after VP");
            if (!sc_.consume('1')) sc_.fail("'1/(' in VP factor");
            if (!sc_.consume('/')) sc_.fail("'/' in VP factor");
            if (!sc_.consume('(')) sc_.fail("'(' in VP factor");
            Affine a = affine();
            if (!sc_.consume(')')) sc_.fail("')' closing the pole argument");
            int deg = 1;
            if (sc_.consume('^')) deg = sc_.small_int();
            if (deg < 1) sc_.fail("pole degree >= 1");
            if (!sc_.consume(']')) sc_.fail("']' closing the VP factor");
            return make_vp(std::move(a), deg);
        }
        if (sc_.consume_word("log")) {
            if (!sc_.consume('|')) sc_.fail("'|' after log");
            Affine a = affine();
            if (!sc_.consume('|')) sc_.fail("closing '|'");
            return make_log(std::move(a));
        }
        if (sc_.consume_word("delta")) {
            int order = 0;
            if (sc_.consume('^')) {
                if (!sc_.consume('(')) sc_.fail("'(' in delta order");
                order = sc_.small_int();
                if (!sc_.consume(')')) sc_.fail("')' in delta order");
            }
            if (!sc_.consume('(')) sc_.fail("'(' in delta argument");
            Affine a = affine();
            if (!sc_.consume(')')) sc_.fail("')' in delta argument");
            return make_delta(order, std::move(a));
        }
        if (sc_.consume_word("theta")) {
            if (!sc_.consume('(')) sc_.fail("'(' in theta argument");
            Affine a = affine();
            if (!sc_.consume(')')) sc_.fail("')' in theta argument");
            return make_theta(std::move(a));
        }
        // named smooth function
        std::string name = sc_.ident();
        if (!sc_.consume('(')) sc_.fail("'(' after function name");
        std::vector<Affine> args;
        args.push_back(affine());
        while (sc_.consume(',')) args.push_back(affine());
        if (!sc_.consume(')')) sc_.fail("')' closing argument list");
        SmoothPtr fn;
        auto it = ctx_.functions.find(name);
        if (it != ctx_.functions.end()) {
            fn = it->second;
            if (fn->arity() != static_cast<int>(args.size()))
                sc_.fail("matching arity for '" + name + "'");
        } else {
            fn = symbolic_function(name, static_cast<int>(args.size()));
        }
        return make_smooth(std::move(fn), std::move(args));
    }
};

std::string print_picoeff_atom(const PiCoeff& c) {
    // single monomial, positive or negative
    return c.to_string();
}

} // namespace

SmoothPtr symbolic_function(const std::string& name, int arity) {
    static std::mutex mu;
    static std::map<std::pair<std::string, int>, SmoothPtr> interned;
    std::scoped_lock lock(mu);
    auto key = std::make_pair(name, arity);
    auto it = interned.find(key);
    if (it != interned.end()) return it->second;
    auto fn = std::make_shared<SymbolicFn>(name, arity);
    interned[key] = fn;
    return fn;
}

DistExpr parse_expr(const std::string& src, const Context& ctx) {
    if (src.empty()) throw ParseError("empty expression", 1, 1, "expression");
    Parser p(src, ctx);
    return p.expr();
}

Affine parse_affine(const std::string& src) {
    Context ctx;
    Parser p(src, ctx);
    return p.affine_expr();
}

std::string print_factor(const Factor& f) {
    switch (f.kind_rank()) {
    case 0: {
        const auto& d = f.as<DeltaF>();
        std::string s = "delta";
        if (d.order > 0) s += "^(" + std::to_string(d.order) + ")";
        return s + "(" + d.arg.to_string() + ")";
    }
    case 1: {
        const auto& p = f.as<VPPoleF>();
        std::string s = "VP[1/(" + p.arg.to_string() + ")";
        if (p.degree != 1) s += "^" + std::to_string(p.degree);
        return s + "]";
    }
    case 2:
        return "log|" + f.as<LogAbsF>().arg.to_string() + "|";
    case 3:
        return "theta(" + f.as<HeavisideF>().arg.to_string() + ")";
    case 4: {
        const auto& s = f.as<SmoothF>();
        std::string out = s.fn->name() + "(";
        for (size_t i = 0; i < s.args.size(); ++i) {
            if (i) out += ", ";
            out += s.args[i].to_string();
        }
        return out + ")";
    }
    default: {
        // Residual integrals print in an extended display-only syntax.
        const auto& li = f.as<LogIntegralF>();
        std::string out = "RInt";
        if (li.kernel_degree > 0) out += "^" + std::to_string(li.kernel_degree);
        out += "[" + li.bound.name + " | " + li.center.to_string() + " | " +
               li.lower.to_string() + " .. " + li.upper.to_string() + "]";
        out += "{";
        for (size_t i = 0; i < li.weight.size(); ++i) {
            if (i) out += " * ";
            out += print_factor(li.weight[i]);
        }
        out += "}";
        return out;
    }
    }
}

std::string print_expr(const DistExpr& e) {
    if (e.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : e.terms) {
        PiCoeff c = t.coeff;
        bool neg = false;
        if (c.is_rational() && c.rational_part().sign() < 0) {
            neg = true;
            c = -c;
        } else if (!c.terms().empty() && c.terms().size() == 1 &&
                   c.terms().begin()->second.sign() < 0) {
            neg = true;
            c = -c;
        }
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;

        std::string body;
        const bool multi = c.terms().size() > 1;
        const bool unit = c.is_one();
        if (!unit || t.factors.empty()) {
            body += multi ? "(" + print_picoeff_atom(c) + ")" : print_picoeff_atom(c);
            if (!t.factors.empty()) body += " * ";
        }
        for (size_t i = 0; i < t.factors.size(); ++i) {
            if (i) body += " * ";
            body += print_factor(t.factors[i]);
        }
        out += body;
    }
    return out;
}

} // namespace vpcalc::dsl
