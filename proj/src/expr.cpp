#include "vpcalc/expr.hpp"

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "vpcalc/errors.hpp"

namespace vpcalc {

Factor make_delta(int order, Affine arg) {
    if (order < 0) throw Error("delta derivative order must be >= 0");
    return Factor{DeltaF{order, std::move(arg)}};
}

Factor make_vp(Affine arg, int degree) {
    if (degree < 1) throw Error("VP pole degree must be >= 1");
    return Factor{VPPoleF{std::move(arg), degree}};
}

Factor make_log(Affine arg) { return Factor{LogAbsF{std::move(arg)}}; }

Factor make_theta(Affine arg) { return Factor{HeavisideF{std::move(arg)}}; }

Factor make_smooth(SmoothPtr fn, std::vector<Affine> args) {
    if (static_cast<int>(args.size()) != fn->arity())
        throw Error("smooth factor arity mismatch");
    return Factor{SmoothF{std::move(fn), std::move(args)}};
}

namespace {

int compare_affine_total(const Affine& a, const Affine& b) {
    auto c = a <=> b;
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int compare_affine_vec(const std::vector<Affine>& a, const std::vector<Affine>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i) {
        if (int c = compare_affine_total(a[i], b[i]); c != 0) return c;
    }
    return 0;
}

int compare_smooth(const SmoothF& a, const SmoothF& b) {
    if (int c = a.fn->name().compare(b.fn->name()); c != 0) return c < 0 ? -1 : 1;
    if (int c = compare_affine_vec(a.args, b.args); c != 0) return c;
    auto* pa = dynamic_cast<const PolySmooth*>(a.fn.get());
    auto* pb = dynamic_cast<const PolySmooth*>(b.fn.get());
    if (pa && pb) {
        if (pa->monomials() == pb->monomials()) return 0;
        return pa->monomials() < pb->monomials() ? -1 : 1;
    }
    auto* ca = dynamic_cast<const ConstFn*>(a.fn.get());
    auto* cb = dynamic_cast<const ConstFn*>(b.fn.get());
    if (ca && cb) {
        auto c = ca->value() <=> cb->value();
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (a.fn->equals(*b.fn)) return 0;
    return 0; // distinct opaque handles of equal name: order unspecified, equality false
}

int compare_factor(const Factor& a, const Factor& b);

int compare_factor_vec(const std::vector<Factor>& a, const std::vector<Factor>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i) {
        if (int c = compare_factor(a[i], b[i]); c != 0) return c;
    }
    return 0;
}

int compare_factor(const Factor& a, const Factor& b) {
    if (a.kind_rank() != b.kind_rank()) return a.kind_rank() < b.kind_rank() ? -1 : 1;
    switch (a.kind_rank()) {
    case 0: {
        const auto& x = a.as<DeltaF>();
        const auto& y = b.as<DeltaF>();
        if (int c = compare_affine_total(x.arg, y.arg); c != 0) return c;
        return x.order == y.order ? 0 : (x.order < y.order ? -1 : 1);
    }
    case 1: {
        const auto& x = a.as<VPPoleF>();
        const auto& y = b.as<VPPoleF>();
        if (int c = compare_affine_total(x.arg, y.arg); c != 0) return c;
        return x.degree == y.degree ? 0 : (x.degree < y.degree ? -1 : 1);
    }
    case 2:
        return compare_affine_total(a.as<LogAbsF>().arg, b.as<LogAbsF>().arg);
    case 3:
        return compare_affine_total(a.as<HeavisideF>().arg, b.as<HeavisideF>().arg);
    case 4:
        return compare_smooth(a.as<SmoothF>(), b.as<SmoothF>());
    default: {
        const auto& x = a.as<LogIntegralF>();
        const auto& y = b.as<LogIntegralF>();
        if (x.bound != y.bound) return x.bound < y.bound ? -1 : 1;
        if (x.kernel_degree != y.kernel_degree) return x.kernel_degree < y.kernel_degree ? -1 : 1;
        if (int c = compare_affine_total(x.center, y.center); c != 0) return c;
        if (int c = compare_affine_total(x.lower, y.lower); c != 0) return c;
        if (int c = compare_affine_total(x.upper, y.upper); c != 0) return c;
        return compare_factor_vec(x.weight, y.weight);
    }
    }
}

bool factor_equal_impl(const Factor& a, const Factor& b) {
    if (a.kind_rank() != b.kind_rank()) return false;
    if (a.is<SmoothF>()) {
        const auto& x = a.as<SmoothF>();
        const auto& y = b.as<SmoothF>();
        return x.fn->equals(*y.fn) && compare_affine_vec(x.args, y.args) == 0;
    }
    if (a.is<LogIntegralF>()) {
        const auto& x = a.as<LogIntegralF>();
        const auto& y = b.as<LogIntegralF>();
        if (x.bound != y.bound || x.kernel_degree != y.kernel_degree || x.center != y.center ||
            x.lower != y.lower || x.upper != y.upper ||
            x.weight.size() != y.weight.size())
            return false;
        for (size_t i = 0; i < x.weight.size(); ++i)
            if (!factor_equal_impl(x.weight[i], y.weight[i])) return false;
        return true;
    }
    return compare_factor(a, b) == 0;
}

} // namespace

bool factor_equal(const Factor& a, const Factor& b) { return factor_equal_impl(a, b); }

bool factor_less(const Factor& a, const Factor& b) { return compare_factor(a, b) < 0; }

std::set<Var> factor_vars(const Factor& f) {
    std::set<Var> s;
    auto add = [&](const Affine& a) {
        for (const auto& [v, c] : a.coeffs()) s.insert(v);
    };
    switch (f.kind_rank()) {
    case 0: add(f.as<DeltaF>().arg); break;
    case 1: add(f.as<VPPoleF>().arg); break;
    case 2: add(f.as<LogAbsF>().arg); break;
    case 3: add(f.as<HeavisideF>().arg); break;
    case 4:
        for (const auto& a : f.as<SmoothF>().args) add(a);
        break;
    default: {
        const auto& li = f.as<LogIntegralF>();
        add(li.center);
        add(li.lower);
        add(li.upper);
        for (const auto& w : li.weight) {
            for (const auto& v : factor_vars(w))
                if (v != li.bound) s.insert(v);
        }
        break;
    }
    }
    return s;
}

bool factor_depends_on(const Factor& f, const Var& v) {
    auto vs = factor_vars(f);
    return vs.count(v) != 0;
}

bool term_equal(const DistTerm& a, const DistTerm& b) {
    if (!(a.coeff == b.coeff) || a.factors.size() != b.factors.size()) return false;
    for (size_t i = 0; i < a.factors.size(); ++i)
        if (!factor_equal(a.factors[i], b.factors[i])) return false;
    return true;
}

bool expr_equal(const DistExpr& a, const DistExpr& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i)
        if (!term_equal(a.terms[i], b.terms[i])) return false;
    return true;
}

DistExpr DistExpr::constant(PiCoeff c) {
    if (c.is_zero()) return {};
    DistExpr e;
    e.terms.push_back(DistTerm{std::move(c), {}});
    return e;
}

DistExpr DistExpr::single(DistTerm t) {
    DistExpr e;
    e.terms.push_back(std::move(t));
    return e;
}

DistExpr DistExpr::single(PiCoeff coeff, std::vector<Factor> factors) {
    return single(DistTerm{std::move(coeff), std::move(factors)});
}

std::set<Var> DistExpr::free_vars() const {
    std::set<Var> s;
    for (const auto& t : terms) {
        for (const auto& f : t.factors) {
            auto vs = factor_vars(f);
            s.insert(vs.begin(), vs.end());
        }
    }
    return s;
}

DistExpr DistExpr::operator-() const {
    DistExpr r = *this;
    for (auto& t : r.terms) t.coeff = -t.coeff;
    return r;
}

DistExpr operator+(const DistExpr& a, const DistExpr& b) {
    DistExpr r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
}

DistExpr operator-(const DistExpr& a, const DistExpr& b) { return a + (-b); }

DistExpr DistExpr::scaled(const PiCoeff& c) const {
    if (c.is_zero()) return {};
    DistExpr r = *this;
    for (auto& t : r.terms) t.coeff *= c;
    return r;
}

double evaluate_term_pointwise(const DistTerm& t, const std::map<std::string, double>& assignment,
                               double tol) {
    double v = t.coeff.to_double();
    for (const auto& f : t.factors) {
        switch (f.kind_rank()) {
        case 0:
            throw DeltaNotEvaluable("delta factor in pointwise evaluation");
        case 1: {
            const auto& p = f.as<VPPoleF>();
            const double a = p.arg.eval(assignment);
            if (std::abs(a) <= tol)
                throw SingularEvaluation("pole argument " + p.arg.to_string() + " vanishes");
            v /= std::pow(a, p.degree);
            break;
        }
        case 2: {
            const double a = f.as<LogAbsF>().arg.eval(assignment);
            if (std::abs(a) <= tol)
                throw SingularEvaluation("log argument " + f.as<LogAbsF>().arg.to_string() +
                                         " vanishes");
            v *= std::log(std::abs(a));
            break;
        }
        case 3: {
            const double a = f.as<HeavisideF>().arg.eval(assignment);
            if (std::abs(a) <= tol)
                throw ThresholdUndefined("theta argument at its threshold");
            if (a < 0) return 0.0;
            break;
        }
        case 4: {
            const auto& s = f.as<SmoothF>();
            std::vector<double> args;
            args.reserve(s.args.size());
            for (const auto& a : s.args) args.push_back(a.eval(assignment));
            v *= s.fn->eval(args);
            break;
        }
        default:
            v *= eval_log_integral(f.as<LogIntegralF>(), assignment, tol);
            break;
        }
        if (v == 0.0) return 0.0;
    }
    return v;
}

double evaluate_pointwise(const DistExpr& e, const std::map<std::string, double>& assignment,
                          double tol) {
    double sum = 0.0;
    for (const auto& t : e.terms) sum += evaluate_term_pointwise(t, assignment, tol);
    return sum;
}

namespace {

DistTerm with_factor_replaced(const DistTerm& t, size_t index, Factor f) {
    DistTerm r = t;
    r.factors[index] = std::move(f);
    return r;
}

} // namespace

DistExpr differentiate(const DistTerm& t, const Var& v) {
    DistExpr out;
    for (size_t i = 0; i < t.factors.size(); ++i) {
        const Factor& f = t.factors[i];
        switch (f.kind_rank()) {
        case 0: {
            const auto& d = f.as<DeltaF>();
            Rational c = d.arg.coeff(v);
            if (c.is_zero()) break;
            DistTerm nt = with_factor_replaced(t, i, make_delta(d.order + 1, d.arg));
            nt.coeff *= PiCoeff(c);
            out.terms.push_back(std::move(nt));
            break;
        }
        case 1: {
            const auto& p = f.as<VPPoleF>();
            Rational c = p.arg.coeff(v);
            if (c.is_zero()) break;
            DistTerm nt = with_factor_replaced(t, i, make_vp(p.arg, p.degree + 1));
            nt.coeff *= PiCoeff(c * Rational(-p.degree));
            out.terms.push_back(std::move(nt));
            break;
        }
        case 2: {
            const auto& l = f.as<LogAbsF>();
            Rational c = l.arg.coeff(v);
            if (c.is_zero()) break;
            DistTerm nt = with_factor_replaced(t, i, make_vp(l.arg, 1));
            nt.coeff *= PiCoeff(c);
            out.terms.push_back(std::move(nt));
            break;
        }
        case 3: {
            const auto& h = f.as<HeavisideF>();
            Rational c = h.arg.coeff(v);
            if (c.is_zero()) break;
            DistTerm nt = with_factor_replaced(t, i, make_delta(0, h.arg));
            nt.coeff *= PiCoeff(c);
            out.terms.push_back(std::move(nt));
            break;
        }
        case 4: {
            const auto& s = f.as<SmoothF>();
            for (size_t k = 0; k < s.args.size(); ++k) {
                Rational c = s.args[k].coeff(v);
                if (c.is_zero()) continue;
                SmoothF ds{derivative_of(s.fn, static_cast<int>(k), 1), s.args};
                DistTerm nt = with_factor_replaced(t, i, Factor{std::move(ds)});
                nt.coeff *= PiCoeff(c);
                out.terms.push_back(std::move(nt));
            }
            break;
        }
        default: {
            const auto& li = f.as<LogIntegralF>();
            // Center direction: lifts the kernel degree exactly.
            Rational cc = li.center.coeff(v);
            if (!cc.is_zero()) {
                LogIntegralF lifted = li;
                lifted.kernel_degree += 1;
                Rational mult = li.kernel_degree == 0 ? Rational(-1) : Rational(li.kernel_degree);
                DistTerm nt = with_factor_replaced(t, i, Factor{std::move(lifted)});
                nt.coeff *= PiCoeff(cc * mult);
                out.terms.push_back(std::move(nt));
            }
            // Leibniz boundary terms for variable limits.
            auto boundary = [&](const Affine& point, const Rational& slope, int sign) {
                if (slope.is_zero()) return;
                // kernel at t = point, weight at t = point
                std::vector<Factor> fs;
                fs.reserve(t.factors.size() + li.weight.size() + 1);
                for (size_t j = 0; j < t.factors.size(); ++j)
                    if (j != i) fs.push_back(t.factors[j]);
                Affine karg = point - li.center;
                if (li.kernel_degree == 0) {
                    fs.push_back(make_log(karg));
                } else {
                    fs.push_back(make_vp(karg, li.kernel_degree));
                }
                for (const auto& w : li.weight) {
                    Factor wf = w;
                    // substitute the bound variable by the endpoint
                    DistTerm tmp{PiCoeff(1), {wf}};
                    tmp = substitute(tmp, li.bound, point);
                    fs.push_back(tmp.factors[0]);
                }
                DistTerm nt{t.coeff * PiCoeff(slope * Rational(sign)), std::move(fs)};
                out.terms.push_back(std::move(nt));
            };
            boundary(li.upper, li.upper.coeff(v), +1);
            boundary(li.lower, li.lower.coeff(v), -1);
            // Dependence of the weight on v (through free variables).
            DistTerm weight_term{PiCoeff(1), li.weight};
            DistExpr dw = differentiate(weight_term, v);
            for (const auto& wt : dw.terms) {
                LogIntegralF nli = li;
                nli.weight = wt.factors;
                DistTerm nt = with_factor_replaced(t, i, Factor{std::move(nli)});
                nt.coeff *= wt.coeff;
                out.terms.push_back(std::move(nt));
            }
            break;
        }
        }
    }
    return out;
}

DistExpr differentiate(const DistExpr& e, const Var& v) {
    DistExpr out;
    for (const auto& t : e.terms) {
        DistExpr d = differentiate(t, v);
        out.terms.insert(out.terms.end(), d.terms.begin(), d.terms.end());
    }
    return out;
}

DistTerm substitute(const DistTerm& t, const Var& v, const Affine& a) {
    DistTerm r = t;
    for (auto& f : r.factors) {
        switch (f.kind_rank()) {
        case 0: f.as<DeltaF>().arg = f.as<DeltaF>().arg.substituted(v, a); break;
        case 1: f.as<VPPoleF>().arg = f.as<VPPoleF>().arg.substituted(v, a); break;
        case 2: f.as<LogAbsF>().arg = f.as<LogAbsF>().arg.substituted(v, a); break;
        case 3: f.as<HeavisideF>().arg = f.as<HeavisideF>().arg.substituted(v, a); break;
        case 4:
            for (auto& arg : f.as<SmoothF>().args) arg = arg.substituted(v, a);
            break;
        default: {
            auto& li = f.as<LogIntegralF>();
            if (v == li.bound) break; // bound variable shadows
            li.center = li.center.substituted(v, a);
            li.lower = li.lower.substituted(v, a);
            li.upper = li.upper.substituted(v, a);
            for (auto& w : li.weight) {
                DistTerm tmp{PiCoeff(1), {w}};
                tmp = substitute(tmp, v, a);
                w = tmp.factors[0];
            }
            break;
        }
        }
    }
    return r;
}

DistExpr substitute(const DistExpr& e, const Var& v, const Affine& a) {
    DistExpr r;
    r.terms.reserve(e.terms.size());
    for (const auto& t : e.terms) r.terms.push_back(substitute(t, v, a));
    return r;
}

namespace detail {

int compare_factor_lists(const std::vector<Factor>& a, const std::vector<Factor>& b) {
    return compare_factor_vec(a, b);
}

} // namespace detail

} // namespace vpcalc
