#include "vpcalc/reduction.hpp"

#include "internal.hpp"
#include "vpcalc/errors.hpp"

namespace vpcalc {

namespace detail {

DistExpr reduce_pair_raw(const Var& x, const Affine& c1, int n1, const Affine& c2, int n2) {
    if (c1 == c2) throw IdenticalCenters("pole product with identical centers");
    if (n1 < 1 || n2 < 1) throw Error("pole degrees must be >= 1");

    const Affine xv(x);
    DistExpr out;

    // Delta chain with the parameter-differentiation sign (-1)^(n1+n2).
    {
        Rational c = Rational(1) / (Rational::factorial(n1 - 1) * Rational::factorial(n2 - 1));
        if ((n1 + n2) % 2 != 0) c = -c;
        DistTerm t;
        t.coeff = PiCoeff::pi2(1, c);
        t.factors.push_back(make_delta(n1 - 1, xv - c1));
        t.factors.push_back(make_delta(n2 - 1, xv - c2));
        out.terms.push_back(std::move(t));
    }

    // sum_k C(n2+k-1, k) (-1)^k VP 1/(z1-z2)^(n2+k) VP 1/(x-z1)^(n1-k), both orientations.
    auto emit = [&](const Affine& za, int na, const Affine& zb, int nb) {
        for (int k = 0; k <= na - 1; ++k) {
            Rational c = Rational::binomial(nb + k - 1, k);
            if (k % 2 != 0) c = -c;
            DistTerm t;
            t.coeff = PiCoeff(c);
            t.factors.push_back(make_vp(za - zb, nb + k));
            t.factors.push_back(make_vp(xv - za, na - k));
            out.terms.push_back(std::move(t));
        }
    };
    emit(c1, n1, c2, n2);
    emit(c2, n2, c1, n1);
    return out;
}

} // namespace detail

DistExpr reduce_pair_simple(const Var& x, const Affine& z1, const Affine& z2) {
    if (z1.depends_on(x) || z2.depends_on(x))
        throw Error("pole centers must not contain the reduction variable");
    return normalize(detail::reduce_pair_raw(x, z1, 1, z2, 1));
}

DistExpr reduce_pair_general(const Var& x, const Affine& z1, int n1, const Affine& z2, int n2) {
    if (z1.depends_on(x) || z2.depends_on(x))
        throw Error("pole centers must not contain the reduction variable");
    return normalize(detail::reduce_pair_raw(x, z1, n1, z2, n2));
}

namespace {

struct XPole {
    size_t index;
    Affine center;
    int degree;
    Rational scale; // VP 1/arg^n = scale * VP 1/(x-center)^n
};

// View a pole factor as a pole in x with exact rescaling.
std::optional<XPole> as_x_pole(const Factor& f, const Var& x, size_t index) {
    if (!f.is<VPPoleF>()) return std::nullopt;
    const auto& p = f.as<VPPoleF>();
    const Rational a = p.arg.coeff(x);
    if (a.is_zero()) return std::nullopt;
    // arg = a (x - c)  with  c = -(arg/a - x)
    Affine c = Affine(x) - p.arg.scaled(Rational(1) / a);
    return XPole{index, std::move(c), p.degree, (Rational(1) / a).pow(p.degree)};
}

// A pole eligible for center-cluster canonicalization: a +-1-coefficient
// difference expression in at most two variables, none of them x.
struct ClusterPole {
    Affine center;
    int degree;
    bool flipped; // arg was -(v - center)
};

std::optional<ClusterPole> cluster_pole(const VPPoleF& p, const Var& v, const Var& x) {
    const auto& coeffs = p.arg.coeffs();
    if (coeffs.empty() || coeffs.size() > 2) return std::nullopt;
    if (!p.arg.depends_on(v) || p.arg.depends_on(x)) return std::nullopt;
    for (const auto& [w, c] : coeffs) {
        if (!(c.is_one() || (-c).is_one())) return std::nullopt;
        if (w > v) return std::nullopt; // v must be the greatest variable
    }
    if (p.arg.coeff(v).is_one()) return ClusterPole{Affine(v) - p.arg, p.degree, false};
    return ClusterPole{Affine(v) + p.arg, p.degree, true};
}

// Rewrite products of difference poles among the centers (never touching the
// reduction variable x) at the greatest shared variable. Terminating because
// each rewrite removes the top variable from one factor of the pair; the
// resulting basis makes the recursive reduction match the symmetric closed
// forms structurally.
DistExpr canonicalize_centers(const DistExpr& e, const Var& x) {
    std::vector<DistTerm> work(e.terms.begin(), e.terms.end());
    std::vector<DistTerm> done;
    size_t guard = 0;
    while (!work.empty()) {
        if (++guard > 200000) throw Error("center canonicalization did not terminate");
        DistTerm t = std::move(work.back());
        work.pop_back();
        bool rewrote = false;
        for (size_t i = 0; i < t.factors.size() && !rewrote; ++i) {
            if (!t.factors[i].is<VPPoleF>()) continue;
            for (size_t j = i + 1; j < t.factors.size() && !rewrote; ++j) {
                if (!t.factors[j].is<VPPoleF>()) continue;
                const auto& pi = t.factors[i].as<VPPoleF>();
                const auto& pj = t.factors[j].as<VPPoleF>();
                std::set<Var> all = pi.arg.vars();
                for (const auto& w : pj.arg.vars()) all.insert(w);
                if (all.empty()) continue;
                const Var v = *all.rbegin();
                if (!pi.arg.depends_on(v) || !pj.arg.depends_on(v)) continue;
                auto ca = cluster_pole(pi, v, x);
                auto cb = cluster_pole(pj, v, x);
                if (!ca || !cb || ca->center == cb->center) continue;

                PiCoeff sign(1);
                if (ca->flipped && ca->degree % 2 != 0) sign = -sign;
                if (cb->flipped && cb->degree % 2 != 0) sign = -sign;
                DistExpr red =
                    detail::reduce_pair_raw(v, ca->center, ca->degree, cb->center, cb->degree);
                std::vector<Factor> rest;
                for (size_t k = 0; k < t.factors.size(); ++k)
                    if (k != i && k != j) rest.push_back(t.factors[k]);
                for (const auto& rt : red.terms) {
                    DistTerm nt;
                    nt.coeff = t.coeff * sign * rt.coeff;
                    nt.factors = rest;
                    nt.factors.insert(nt.factors.end(), rt.factors.begin(), rt.factors.end());
                    // normalization may open new delta substitutions
                    DistExpr n = normalize(DistExpr::single(std::move(nt)));
                    for (auto& x2 : n.terms) work.push_back(std::move(x2));
                }
                rewrote = true;
            }
        }
        if (!rewrote) done.push_back(std::move(t));
    }
    DistExpr out;
    out.terms = std::move(done);
    return normalize(out);
}

} // namespace

DistExpr reduce_in_var(const DistExpr& e, const Var& x) {
    std::vector<DistTerm> work(e.terms.begin(), e.terms.end());
    std::vector<DistTerm> done;
    size_t guard = 0;
    while (!work.empty()) {
        if (++guard > 200000) throw Error("pole reduction did not terminate");
        DistTerm t = std::move(work.back());
        work.pop_back();

        std::vector<XPole> xs;
        for (size_t i = 0; i < t.factors.size(); ++i) {
            if (auto p = as_x_pole(t.factors[i], x, i)) xs.push_back(std::move(*p));
        }
        if (xs.size() < 2) {
            done.push_back(std::move(t));
            continue;
        }
        const XPole& a = xs[0];
        const XPole& b = xs[1];
        if (a.center == b.center) {
            // identical centers merge by degree addition during normalization
            DistExpr n = normalize(DistExpr::single(t));
            bool again = false;
            for (const auto& nt : n.terms) {
                int cnt = 0;
                for (size_t i = 0; i < nt.factors.size(); ++i)
                    if (as_x_pole(nt.factors[i], x, i)) ++cnt;
                if (cnt >= 2) again = true;
            }
            for (auto& nt : n.terms) (again ? work : done).push_back(std::move(nt));
            continue;
        }
        DistExpr red = detail::reduce_pair_raw(x, a.center, a.degree, b.center, b.degree);
        std::vector<Factor> rest;
        for (size_t i = 0; i < t.factors.size(); ++i)
            if (i != a.index && i != b.index) rest.push_back(t.factors[i]);
        for (const auto& rt : red.terms) {
            DistTerm nt;
            nt.coeff = t.coeff * PiCoeff(a.scale * b.scale) * rt.coeff;
            nt.factors = rest;
            nt.factors.insert(nt.factors.end(), rt.factors.begin(), rt.factors.end());
            work.push_back(std::move(nt));
        }
    }
    DistExpr out;
    out.terms = std::move(done);
    return canonicalize_centers(normalize(out), x);
}

DistExpr reduce_product(const Var& x, const std::vector<std::pair<Affine, int>>& poles) {
    if (poles.empty()) throw Error("reduce_product: empty pole list");
    for (const auto& [c, n] : poles) {
        if (n < 1) throw Error("pole degrees must be >= 1");
        if (c.depends_on(x)) throw Error("pole centers must not contain the reduction variable");
    }
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            if (poles[i].first == poles[j].first)
                throw IdenticalCenters("pole product with identical centers");

    const Affine xv(x);
    if (poles.size() == 1)
        return normalize(DistExpr::single(PiCoeff(1), {make_vp(xv - poles[0].first,
                                                              poles[0].second)}));
    if (poles.size() == 2)
        return reduce_pair_general(x, poles[0].first, poles[0].second, poles[1].first,
                                   poles[1].second);

    // Recursive route: reduce the first m-1 poles, multiply by the last one,
    // and re-reduce every arising pair of poles in x.
    std::vector<std::pair<Affine, int>> head(poles.begin(), poles.end() - 1);
    DistExpr acc = reduce_product(x, head);
    DistExpr last = DistExpr::single(PiCoeff(1),
                                     {make_vp(xv - poles.back().first, poles.back().second)});
    DistExpr prod;
    for (const auto& ta : acc.terms) {
        for (const auto& tb : last.terms) {
            DistTerm t;
            t.coeff = ta.coeff * tb.coeff;
            t.factors = ta.factors;
            t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
            prod.terms.push_back(std::move(t));
        }
    }
    return reduce_in_var(prod, x);
}

} // namespace vpcalc
