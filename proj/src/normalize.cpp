#include <algorithm>
#include <optional>

#include "internal.hpp"
#include "vpcalc/errors.hpp"
#include "vpcalc/expr.hpp"

namespace vpcalc {

namespace {

std::optional<Rational> smooth_constant_rational(const SmoothFn& fn) {
    if (auto* c = dynamic_cast<const ConstFn*>(&fn)) return c->value();
    if (auto* p = dynamic_cast<const PolySmooth*>(&fn)) {
        if (p->monomials().empty()) return Rational(0);
        if (p->monomials().size() == 1) {
            const auto& [key, c] = *p->monomials().begin();
            for (int e : key)
                if (e != 0) return std::nullopt;
            return c;
        }
    }
    return std::nullopt;
}

// Normalize factor arguments in place, folding exact scalings into `coeff`.
// Sets `zero` when a factor annihilates the term. Returns true if changed.
bool normalize_factor_args(std::vector<Factor>& fs, PiCoeff& coeff, bool& zero) {
    bool changed = false;
    for (size_t i = 0; i < fs.size();) {
        Factor& f = fs[i];
        bool drop = false;
        switch (f.kind_rank()) {
        case 0: { // delta
            auto& d = f.as<DeltaF>();
            if (d.arg.is_constant()) {
                if (d.arg.constant().is_zero())
                    throw UndefinedProduct("delta of identically zero argument");
                zero = true;
                return true;
            }
            const Var v = *d.arg.leading_var();
            const Rational a = d.arg.coeff(v);
            if (!a.is_one()) {
                // delta^(k)(a t) = a^-k |a|^-1 delta^(k)(t)
                d.arg = d.arg.scaled(Rational(1) / a);
                coeff *= PiCoeff(Rational(1) / (a.pow(d.order) * a.abs()));
                changed = true;
            }
            break;
        }
        case 1: { // VP pole
            auto& p = f.as<VPPoleF>();
            if (p.arg.is_constant()) {
                if (p.arg.constant().is_zero())
                    throw UndefinedProduct("VP pole with identically zero argument");
                coeff *= PiCoeff((Rational(1) / p.arg.constant()).pow(p.degree));
                drop = true;
                changed = true;
                break;
            }
            const Var v = *p.arg.leading_var();
            const Rational a = p.arg.coeff(v);
            if (!a.is_one()) {
                p.arg = p.arg.scaled(Rational(1) / a);
                coeff *= PiCoeff((Rational(1) / a).pow(p.degree));
                changed = true;
            }
            break;
        }
        case 2: { // log
            auto& l = f.as<LogAbsF>();
            if (l.arg.is_constant()) {
                const Rational& q = l.arg.constant();
                if (q.is_zero()) throw UndefinedProduct("log of identically zero argument");
                if (q.abs().is_one()) { // ln 1 = 0 would be a zero term; ln|+-1| = 0
                    zero = true;
                    return true;
                }
                break; // irrational value; folded only at numeric evaluation
            }
            const Var v = *l.arg.leading_var();
            if (l.arg.coeff(v).sign() < 0) {
                l.arg = -l.arg;
                changed = true;
            }
            break;
        }
        case 3: { // theta
            auto& h = f.as<HeavisideF>();
            if (h.arg.is_constant()) {
                const int s = h.arg.constant().sign();
                if (s > 0) {
                    drop = true;
                    changed = true;
                    break;
                }
                if (s < 0) {
                    zero = true;
                    return true;
                }
                throw ThresholdUndefined("theta of identically zero argument");
            }
            const Var v = *h.arg.leading_var();
            const Rational a = h.arg.coeff(v).abs();
            if (!a.is_one()) {
                h.arg = h.arg.scaled(Rational(1) / a);
                changed = true;
            }
            break;
        }
        case 4: { // smooth
            auto& s = f.as<SmoothF>();
            if (s.fn->is_zero()) {
                zero = true;
                return true;
            }
            if (auto c = smooth_constant_rational(*s.fn)) {
                if (c->is_zero()) {
                    zero = true;
                    return true;
                }
                coeff *= PiCoeff(*c);
                drop = true;
                changed = true;
            }
            break;
        }
        default: { // residual integral
            auto& li = f.as<LogIntegralF>();
            if (li.lower == li.upper) {
                zero = true;
                return true;
            }
            bool wzero = false;
            changed |= normalize_factor_args(li.weight, coeff, wzero);
            if (wzero) {
                zero = true;
                return true;
            }
            break;
        }
        }
        if (drop) {
            fs.erase(fs.begin() + static_cast<long>(i));
        } else {
            ++i;
        }
    }
    return changed;
}

Affine delta_center(const DeltaF& d) {
    const Var v = *d.arg.leading_var();
    return Affine(v) - d.arg;
}

// delta^(a)(v-c1) delta^(b)(v-c2) -> (-1)^a sum_j C(b,j) d^(a+j)(c1-c2) d^(b-j)(v-c2)
DistExpr apply_delta_chain(const DistTerm& t, size_t i, size_t j) {
    const auto& d1 = t.factors[i].as<DeltaF>();
    const auto& d2 = t.factors[j].as<DeltaF>();
    const Var v = *d1.arg.leading_var();
    const Affine c1 = delta_center(d1);
    const Affine c2 = delta_center(d2);
    const int a = d1.order;
    const int b = d2.order;

    std::vector<Factor> rest;
    rest.reserve(t.factors.size() - 2);
    for (size_t k = 0; k < t.factors.size(); ++k)
        if (k != i && k != j) rest.push_back(t.factors[k]);

    DistExpr out;
    for (int jj = 0; jj <= b; ++jj) {
        DistTerm nt;
        Rational c = Rational::binomial(b, jj);
        if (a % 2 != 0) c = -c;
        nt.coeff = t.coeff * PiCoeff(c);
        nt.factors = rest;
        nt.factors.push_back(make_delta(a + jj, c1 - c2));
        nt.factors.push_back(make_delta(b - jj, Affine(v) - c2));
        out.terms.push_back(std::move(nt));
    }
    return out;
}

// One rewriting step; nullopt when the term is already in normal form.
std::optional<DistExpr> rewrite_term(DistTerm t) {
    bool zero = false;
    if (normalize_factor_args(t.factors, t.coeff, zero)) {
        if (zero) return DistExpr::zero();
        return DistExpr::single(std::move(t));
    }
    if (zero) return DistExpr::zero();

    // Delta chains: a variable leading two deltas with distinct centers.
    for (size_t i = 0; i < t.factors.size(); ++i) {
        if (!t.factors[i].is<DeltaF>()) continue;
        const Var vi = *t.factors[i].as<DeltaF>().arg.leading_var();
        for (size_t j = i + 1; j < t.factors.size(); ++j) {
            if (!t.factors[j].is<DeltaF>()) continue;
            if (*t.factors[j].as<DeltaF>().arg.leading_var() != vi) continue;
            const Affine c1 = delta_center(t.factors[i].as<DeltaF>());
            const Affine c2 = delta_center(t.factors[j].as<DeltaF>());
            if (c1 == c2) {
                if (t.factors[i].as<DeltaF>().order == t.factors[j].as<DeltaF>().order)
                    continue; // undefined square of a delta; left intact
                continue;
            }
            if (c1 <= c2) return apply_delta_chain(t, i, j);
            return apply_delta_chain(t, j, i);
        }
    }

    // Substitution closure: an order-0 delta constraint v = c is substituted
    // into every other factor, unless that would collapse a pole or log onto
    // the same singular locus (those products are left intact and rejected
    // only by integration).
    for (size_t i = 0; i < t.factors.size(); ++i) {
        if (!t.factors[i].is<DeltaF>()) continue;
        const auto& d = t.factors[i].as<DeltaF>();
        if (d.order != 0) continue;
        const Var v = *d.arg.leading_var();
        const Affine c = delta_center(d);
        bool applies = false;
        bool blocked = false;
        for (size_t j = 0; j < t.factors.size(); ++j) {
            if (j == i) continue;
            if (!factor_depends_on(t.factors[j], v)) continue;
            applies = true;
            if (t.factors[j].is<VPPoleF>() &&
                t.factors[j].as<VPPoleF>().arg.substituted(v, c).is_zero())
                blocked = true;
            if (t.factors[j].is<LogAbsF>() &&
                t.factors[j].as<LogAbsF>().arg.substituted(v, c).is_zero())
                blocked = true;
        }
        if (!applies || blocked) continue;
        DistTerm nt = t;
        for (size_t j = 0; j < nt.factors.size(); ++j) {
            if (j == i) continue;
            DistTerm tmp{PiCoeff(1), {nt.factors[j]}};
            tmp = substitute(tmp, v, c);
            nt.factors[j] = tmp.factors[0];
        }
        return DistExpr::single(std::move(nt));
    }

    // Merge identical-argument poles (degrees add) and theta duplicates.
    for (size_t i = 0; i < t.factors.size(); ++i) {
        for (size_t j = i + 1; j < t.factors.size(); ++j) {
            if (t.factors[i].is<VPPoleF>() && t.factors[j].is<VPPoleF>() &&
                t.factors[i].as<VPPoleF>().arg == t.factors[j].as<VPPoleF>().arg) {
                DistTerm nt = t;
                nt.factors[i].as<VPPoleF>().degree += nt.factors[j].as<VPPoleF>().degree;
                nt.factors.erase(nt.factors.begin() + static_cast<long>(j));
                return DistExpr::single(std::move(nt));
            }
            if (t.factors[i].is<HeavisideF>() && t.factors[j].is<HeavisideF>() &&
                t.factors[i].as<HeavisideF>().arg == t.factors[j].as<HeavisideF>().arg) {
                DistTerm nt = t;
                nt.factors.erase(nt.factors.begin() + static_cast<long>(j));
                return DistExpr::single(std::move(nt));
            }
        }
    }

    return std::nullopt;
}

} // namespace

namespace detail {

DistExpr merge_terms(std::vector<DistTerm> terms) {
    for (auto& t : terms) std::stable_sort(t.factors.begin(), t.factors.end(), factor_less);
    std::stable_sort(terms.begin(), terms.end(), [](const DistTerm& a, const DistTerm& b) {
        return compare_factor_lists(a.factors, b.factors) < 0;
    });
    DistExpr out;
    for (auto& t : terms) {
        if (t.coeff.is_zero()) continue;
        if (!out.terms.empty() &&
            compare_factor_lists(out.terms.back().factors, t.factors) == 0) {
            bool all_equal = out.terms.back().factors.size() == t.factors.size();
            for (size_t i = 0; all_equal && i < t.factors.size(); ++i)
                all_equal = factor_equal(out.terms.back().factors[i], t.factors[i]);
            if (all_equal) {
                out.terms.back().coeff += t.coeff;
                if (out.terms.back().coeff.is_zero()) out.terms.pop_back();
                continue;
            }
        }
        out.terms.push_back(std::move(t));
    }
    return out;
}

} // namespace detail

DistExpr normalize(const DistExpr& e) {
    std::vector<DistTerm> work(e.terms.begin(), e.terms.end());
    std::vector<DistTerm> done;
    size_t guard = 0;
    while (!work.empty()) {
        if (++guard > 500000) throw Error("expression normalization did not terminate");
        DistTerm t = std::move(work.back());
        work.pop_back();
        if (t.coeff.is_zero()) continue;
        auto rw = rewrite_term(t);
        if (!rw) {
            done.push_back(std::move(t));
            continue;
        }
        for (auto& nt : rw->terms) work.push_back(std::move(nt));
    }
    return detail::merge_terms(std::move(done));
}

DistExpr mul_expr(const DistExpr& a, const DistExpr& b) {
    DistExpr prod;
    prod.terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            DistTerm t;
            t.coeff = ta.coeff * tb.coeff;
            t.factors = ta.factors;
            t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
            prod.terms.push_back(std::move(t));
        }
    }
    return normalize(prod);
}

} // namespace vpcalc
