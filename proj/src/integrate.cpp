#include "vpcalc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "engine_quad.hpp"
#include "internal.hpp"
#include "vpcalc/dsl.hpp"
#include "vpcalc/errors.hpp"
#include "vpcalc/reduction.hpp"

namespace vpcalc {

namespace {

struct PoleView {
    size_t index;
    Affine center;
    int degree;
    Rational slope; // coefficient of the variable in the stored argument
};

std::optional<PoleView> pole_in_var(const Factor& f, const Var& v, size_t index) {
    if (!f.is<VPPoleF>()) return std::nullopt;
    const auto& p = f.as<VPPoleF>();
    const Rational a = p.arg.coeff(v);
    if (a.is_zero()) return std::nullopt;
    Affine c = Affine(v) - p.arg.scaled(Rational(1) / a);
    return PoleView{index, std::move(c), p.degree, a};
}

std::optional<size_t> delta_in_var(const DistTerm& t, const Var& v) {
    for (size_t i = 0; i < t.factors.size(); ++i) {
        if (t.factors[i].is<DeltaF>() && t.factors[i].as<DeltaF>().arg.depends_on(v)) return i;
    }
    return std::nullopt;
}

DistTerm without_factor(const DistTerm& t, size_t index) {
    DistTerm r;
    r.coeff = t.coeff;
    for (size_t i = 0; i < t.factors.size(); ++i)
        if (i != index) r.factors.push_back(t.factors[i]);
    return r;
}

DistExpr differentiate_times(const DistTerm& t, const Var& v, int k) {
    DistExpr cur = DistExpr::single(t);
    for (int i = 0; i < k; ++i) cur = differentiate(cur, v);
    return cur;
}

Factor affine_identity_factor(const Affine& a) {
    return make_smooth(PolySmooth::coordinate(1, 0), {a});
}

} // namespace

// ---------------------------------------------------------------------------
// IntegrationSpec

IntegrationSpec IntegrationSpec::parse(const std::string& text) {
    IntegrationSpec spec;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ';')) {
        // trim
        size_t b = piece.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        size_t e = piece.find_last_not_of(" \t");
        piece = piece.substr(b, e - b + 1);
        size_t eq = piece.find('=');
        if (eq == std::string::npos)
            throw ParseError("integration step needs 'var=lo..hi'", 1, 1, "'='");
        size_t dots = piece.find("..", eq);
        if (dots == std::string::npos)
            throw ParseError("integration step needs 'var=lo..hi'", 1, 1, "'..'");
        IntegrationStep st;
        std::string name = piece.substr(0, eq);
        name.erase(name.find_last_not_of(" \t") + 1);
        st.var = Var(name);
        std::string lo = piece.substr(eq + 1, dots - eq - 1);
        std::string hi = piece.substr(dots + 2);
        auto strip = [](std::string s) {
            size_t b2 = s.find_first_not_of(" \t");
            if (b2 == std::string::npos) return std::string();
            size_t e2 = s.find_last_not_of(" \t");
            return s.substr(b2, e2 - b2 + 1);
        };
        lo = strip(lo);
        hi = strip(hi);
        if (lo == "-inf") {
            st.lower_infinite = true;
        } else {
            st.lower = dsl::parse_affine(lo);
        }
        if (hi == "inf") {
            st.upper_infinite = true;
        } else {
            st.upper = dsl::parse_affine(hi);
        }
        spec.steps.push_back(std::move(st));
    }
    if (spec.steps.empty())
        throw ParseError("empty integration specification", 1, 1, "steps");
    spec.validate();
    return spec;
}

std::string IntegrationSpec::to_string() const {
    std::string out;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i) out += "; ";
        out += steps[i].var.name + "=" +
               (steps[i].lower_infinite ? "-inf" : steps[i].lower.to_string()) + ".." +
               (steps[i].upper_infinite ? "inf" : steps[i].upper.to_string());
    }
    return out;
}

void IntegrationSpec::validate() const {
    for (size_t i = 0; i < steps.size(); ++i) {
        for (size_t j = 0; j <= i; ++j) {
            const Var& earlier = steps[j].var;
            if (steps[i].lower.depends_on(earlier) || steps[i].upper.depends_on(earlier))
                throw Error("limits of step '" + steps[i].var.name +
                            "' may depend only on variables of later steps");
        }
        for (size_t j = i + 1; j < steps.size(); ++j)
            if (steps[j].var == steps[i].var) throw Error("duplicate integration variable");
    }
}

// ---------------------------------------------------------------------------
// Symbolic per-term steps

DistExpr integrate_vp_term(const DistTerm& t, const Var& var, const Affine& a, const Affine& b) {
    std::optional<PoleView> pole;
    std::vector<Factor> smooth_in_var;
    std::vector<Factor> rest;
    for (size_t i = 0; i < t.factors.size(); ++i) {
        const Factor& f = t.factors[i];
        if (!factor_depends_on(f, var)) {
            rest.push_back(f);
            continue;
        }
        if (f.is<VPPoleF>()) {
            if (pole) throw Error("integrate_vp_term: more than one pole in the variable");
            pole = pole_in_var(f, var, i);
            continue;
        }
        if (f.is<DeltaF>())
            throw Error("integrate_vp_term: delta in the integration variable");
        if (!f.is<SmoothF>())
            throw Error("integrate_vp_term: non-smooth weight in the integration variable");
        smooth_in_var.push_back(f);
    }
    if (!pole) throw Error("integrate_vp_term: no pole in the variable");
    const int n = pole->degree;
    const Affine& c = pole->center;
    if (c == a || c == b)
        throw PoleAtEndpoint("pole center coincides with an integration limit");

    PiCoeff k0 = t.coeff * PiCoeff((Rational(1) / pole->slope).pow(n));
    const Rational pref = Rational(1) / Rational::factorial(n - 1);
    DistTerm U{PiCoeff(1), smooth_in_var};

    DistExpr out;
    // residual: -1/(n-1)! * int ln|x-c| u^(n)
    for (const auto& w : differentiate_times(U, var, n).terms) {
        LogIntegralF li;
        li.bound = var;
        li.kernel_degree = 0;
        li.center = c;
        li.lower = a;
        li.upper = b;
        li.weight = w.factors;
        DistTerm nt;
        nt.coeff = k0 * PiCoeff(-pref) * w.coeff;
        nt.factors = rest;
        nt.factors.push_back(Factor{std::move(li)});
        out.terms.push_back(std::move(nt));
    }
    // endpoint logs: +1/(n-1)! [ ln|b-c| u^(n-1)(b) - ln|a-c| u^(n-1)(a) ]
    for (int s = 0; s < 2; ++s) {
        const Affine& P = s == 0 ? b : a;
        const int sign = s == 0 ? 1 : -1;
        for (const auto& w : differentiate_times(U, var, n - 1).terms) {
            DistTerm sub = substitute(w, var, P);
            DistTerm nt;
            nt.coeff = k0 * PiCoeff(pref * Rational(sign)) * sub.coeff;
            nt.factors = rest;
            nt.factors.push_back(make_log(P - c));
            nt.factors.insert(nt.factors.end(), sub.factors.begin(), sub.factors.end());
            out.terms.push_back(std::move(nt));
        }
    }
    // endpoint poles: -1/(n-1)! sum_k (k-1)! [ VP(b-c)^-k u^(n-k-1)(b) - ... ]
    for (int k = 1; k <= n - 1; ++k) {
        for (int s = 0; s < 2; ++s) {
            const Affine& P = s == 0 ? b : a;
            const int sign = s == 0 ? 1 : -1;
            for (const auto& w : differentiate_times(U, var, n - k - 1).terms) {
                DistTerm sub = substitute(w, var, P);
                DistTerm nt;
                nt.coeff = k0 *
                           PiCoeff(pref * Rational(-sign) * Rational::factorial(k - 1)) *
                           sub.coeff;
                nt.factors = rest;
                nt.factors.push_back(make_vp(P - c, k));
                nt.factors.insert(nt.factors.end(), sub.factors.begin(), sub.factors.end());
                out.terms.push_back(std::move(nt));
            }
        }
    }
    return normalize(out);
}

DistExpr integrate_separable(const DistTerm& t, const Var& var, const Affine& a,
                             const Affine& b) {
    std::optional<PoleView> pole;
    std::vector<Factor> weight;
    std::vector<Factor> rest;
    for (size_t i = 0; i < t.factors.size(); ++i) {
        const Factor& f = t.factors[i];
        if (!factor_depends_on(f, var)) {
            rest.push_back(f);
            continue;
        }
        if (f.is<VPPoleF>() && pole_in_var(f, var, i) && !pole) {
            pole = pole_in_var(f, var, i);
            continue;
        }
        if (f.is<DeltaF>()) throw Error("integrate_separable: delta in the integration variable");
        weight.push_back(f);
    }
    if (!pole) throw Error("integrate_separable: no pole in the variable");
    if (pole->center == a || pole->center == b)
        throw PoleAtEndpoint("pole center coincides with an integration limit");

    const auto cvars = pole->center.vars();
    for (const auto& cv : cvars) {
        if (a.depends_on(cv) || b.depends_on(cv))
            throw NotSeparable("integration limits involve the pole-center variables");
        for (const auto& f : weight) {
            auto vs = factor_vars(f);
            if (vs.count(cv))
                throw NotSeparable("weight involves the pole-center variables");
        }
    }
    // Same-locus products VP * log / VP * theta are outside the calculus.
    for (const auto& f : weight) {
        if (f.is<LogAbsF>() && f.as<LogAbsF>().arg.substituted(var, pole->center).is_zero())
            throw UndefinedProduct("VP pole multiplied by a log with the same locus");
    }

    LogIntegralF li;
    li.bound = var;
    li.kernel_degree = pole->degree;
    li.center = pole->center;
    li.lower = a;
    li.upper = b;
    li.weight = std::move(weight);

    DistTerm nt;
    nt.coeff = t.coeff * PiCoeff((Rational(1) / pole->slope).pow(pole->degree));
    nt.factors = std::move(rest);
    nt.factors.push_back(Factor{std::move(li)});
    return normalize(DistExpr::single(std::move(nt)));
}

DistExpr integrate_delta(const DistTerm& t, const Var& var, const Affine& a, const Affine& b) {
    auto di = delta_in_var(t, var);
    if (!di) throw Error("integrate_delta: no delta in the variable");
    const auto& d = t.factors[*di].as<DeltaF>();
    const Rational gamma = d.arg.coeff(var);
    const Affine c = Affine(var) - d.arg.scaled(Rational(1) / gamma);
    const int k = d.order;
    if (c == a || c == b)
        throw DeltaAtEndpoint("delta point coincides with an integration limit");

    DistTerm rest = without_factor(t, *di);
    rest.coeff *= PiCoeff(Rational(1) / (gamma.pow(k) * gamma.abs()));
    if (k % 2 != 0) rest.coeff = -rest.coeff;

    DistExpr derivs = differentiate_times(rest, var, k);
    DistExpr out;
    for (const auto& w : derivs.terms) {
        DistTerm nt = substitute(w, var, c);
        nt.factors.push_back(make_theta(b - c));
        nt.factors.push_back(make_theta(c - a));
        out.terms.push_back(std::move(nt));
    }
    return normalize(out);
}

// ---------------------------------------------------------------------------
// Step router

namespace {

struct ClipResult {
    DistTerm term;
    Affine lower, upper;
    bool zero = false;
    bool undecidable = false; // a theta in the step variable resisted clipping
};

ClipResult clip_guards(DistTerm t, const Var& v, Affine a, Affine b) {
    ClipResult r;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < t.factors.size(); ++i) {
            if (!t.factors[i].is<HeavisideF>()) continue;
            const auto& h = t.factors[i].as<HeavisideF>();
            const Rational alpha = h.arg.coeff(v);
            if (alpha.is_zero()) continue;
            Affine cross = Affine(v) - h.arg.scaled(Rational(1) / alpha);
            const bool wants_above = alpha.sign() > 0; // guard holds for v > cross
            auto vs_lower = compare_affine(cross, a);
            auto vs_upper = compare_affine(cross, b);
            if (wants_above) {
                if (vs_lower && *vs_lower <= 0) { // always true on [a, b]
                    t.factors.erase(t.factors.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
                if (vs_upper && *vs_upper >= 0) {
                    r.zero = true;
                    r.term = std::move(t);
                    r.lower = a;
                    r.upper = b;
                    return r;
                }
                if (vs_lower && vs_upper && *vs_lower > 0 && *vs_upper < 0) {
                    a = cross;
                    t.factors.erase(t.factors.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            } else {
                if (vs_upper && *vs_upper >= 0) {
                    t.factors.erase(t.factors.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
                if (vs_lower && *vs_lower <= 0) {
                    r.zero = true;
                    r.term = std::move(t);
                    r.lower = a;
                    r.upper = b;
                    return r;
                }
                if (vs_lower && vs_upper && *vs_lower > 0 && *vs_upper < 0) {
                    b = cross;
                    t.factors.erase(t.factors.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
    }
    for (const auto& f : t.factors)
        if (f.is<HeavisideF>() && f.as<HeavisideF>().arg.depends_on(v)) r.undecidable = true;
    r.term = std::move(t);
    r.lower = std::move(a);
    r.upper = std::move(b);
    return r;
}

bool separable_possible(const DistTerm& t, const Var& v, const PoleView& pole, const Affine& a,
                        const Affine& b) {
    const auto cvars = pole.center.vars();
    for (const auto& cv : cvars) {
        if (a.depends_on(cv) || b.depends_on(cv)) return false;
        for (size_t i = 0; i < t.factors.size(); ++i) {
            if (i == pole.index || !factor_depends_on(t.factors[i], v)) continue;
            if (factor_vars(t.factors[i]).count(cv)) return false;
        }
    }
    return true;
}

} // namespace

StepResult integrate_step(const DistExpr& e, const Var& var, const Affine& a, const Affine& b,
                          int step_index) {
    StepResult result;
    std::vector<DistTerm> work(e.terms.begin(), e.terms.end());
    size_t guard = 0;
    while (!work.empty()) {
        if (++guard > 200000) throw Error("integration step did not terminate");
        DistTerm t = std::move(work.back());
        work.pop_back();
        if (t.coeff.is_zero()) continue;

        if (a == b) continue; // empty range

        ClipResult cl = clip_guards(t, var, a, b);
        if (cl.zero) continue;

        try {
            // Deltas first: they fix the variable regardless of other factors.
            if (delta_in_var(cl.term, var)) {
                DistExpr d = integrate_delta(cl.term, var, cl.lower, cl.upper);
                result.symbolic = result.symbolic + d;
                continue;
            }

            std::vector<PoleView> poles;
            for (size_t i = 0; i < cl.term.factors.size(); ++i)
                if (auto p = pole_in_var(cl.term.factors[i], var, i)) poles.push_back(*p);

            if (poles.size() >= 2) {
                DistExpr red = reduce_in_var(DistExpr::single(cl.term), var);
                for (auto& nt : red.terms) work.push_back(std::move(nt));
                continue;
            }

            if (poles.size() == 1) {
                if (cl.undecidable) {
                    result.numeric.push_back(t);
                    continue;
                }
                const PoleView& p = poles[0];
                // Same-locus log * pole products are outside the calculus.
                for (const auto& f : cl.term.factors) {
                    if (f.is<LogAbsF>() && factor_depends_on(f, var) &&
                        f.as<LogAbsF>().arg.substituted(var, p.center).is_zero())
                        throw UndefinedProduct("VP pole multiplied by a log with the same locus");
                }
                bool all_smooth = true;
                for (size_t i = 0; i < cl.term.factors.size(); ++i) {
                    if (i == p.index || !factor_depends_on(cl.term.factors[i], var)) continue;
                    if (!cl.term.factors[i].is<SmoothF>()) all_smooth = false;
                }
                if (all_smooth) {
                    result.symbolic =
                        result.symbolic + integrate_vp_term(cl.term, var, cl.lower, cl.upper);
                } else if (separable_possible(cl.term, var, p, cl.lower, cl.upper)) {
                    result.symbolic =
                        result.symbolic + integrate_separable(cl.term, var, cl.lower, cl.upper);
                } else {
                    result.numeric.push_back(t);
                }
                continue;
            }

            // No poles, no deltas.
            bool depends = false;
            for (const auto& f : cl.term.factors)
                if (factor_depends_on(f, var)) depends = true;
            if (!depends) {
                DistTerm nt = cl.term;
                Affine len = cl.upper - cl.lower;
                if (len.is_constant()) {
                    nt.coeff *= PiCoeff(len.constant());
                    if (!nt.coeff.is_zero()) result.symbolic = result.symbolic + DistExpr::single(nt);
                } else {
                    nt.factors.push_back(affine_identity_factor(len));
                    result.symbolic = result.symbolic + DistExpr::single(nt);
                }
                continue;
            }
            result.numeric.push_back(t);
        } catch (PoleAtEndpoint& err) {
            throw PoleAtEndpoint(std::string(err.what()) +
                                     (step_index >= 0
                                          ? " (step " + std::to_string(step_index) + ")"
                                          : ""),
                                 step_index);
        } catch (DeltaAtEndpoint& err) {
            throw DeltaAtEndpoint(std::string(err.what()) +
                                      (step_index >= 0
                                           ? " (step " + std::to_string(step_index) + ")"
                                           : ""),
                                  step_index);
        }
    }
    result.symbolic = normalize(result.symbolic);
    return result;
}

// ---------------------------------------------------------------------------
// Numeric evaluation of residual integrals

namespace {

double fp_power_engine(int p, double y, double a, double b) {
    if (p == -1) return std::log(std::abs(b - y)) - std::log(std::abs(a - y));
    const double q = p + 1;
    return (std::pow(b - y, q) - std::pow(a - y, q)) / q;
}

struct SingularPoint {
    double x;
    int degree; // 0: log/kink (split and grade); >=1: pole
    size_t factor_index = static_cast<size_t>(-1);
};

// Candidate singular points of a factor as a function of `v` under the given
// assignment; inner variables are probed at their step limits.
void collect_candidates(const Factor& f, const Var& v,
                        const std::map<std::string, double>& assignment,
                        const std::vector<std::pair<std::string, std::pair<double, double>>>& inner,
                        size_t index, std::vector<SingularPoint>& out) {
    auto solve_in_v = [&](const Affine& arg, int degree, bool probe_inner) {
        const Rational alpha = arg.coeff(v);
        if (alpha.is_zero()) return;
        // split off the v part; evaluate the remainder if possible
        Affine rest = arg - Affine(v).scaled(alpha);
        bool evaluable = true;
        std::set<std::string> inner_vars;
        for (const auto& [w, cw] : rest.coeffs()) {
            if (!assignment.count(w.name)) {
                evaluable = false;
                inner_vars.insert(w.name);
            }
        }
        const double av = alpha.to_double();
        if (evaluable) {
            out.push_back({-rest.eval(assignment) / av, degree, index});
            return;
        }
        if (!probe_inner) return;
        // probe inner variables at their limits (log-type crossings only)
        if (inner_vars.size() != 1) return;
        const std::string wname = *inner_vars.begin();
        for (const auto& [name, limits] : inner) {
            if (name != wname) continue;
            for (double lim : {limits.first, limits.second}) {
                std::map<std::string, double> probe = assignment;
                probe[wname] = lim;
                out.push_back({-rest.eval(probe) / av, 0, index});
            }
        }
    };
    switch (f.kind_rank()) {
    case 1: solve_in_v(f.as<VPPoleF>().arg, f.as<VPPoleF>().degree, true); break;
    case 2: solve_in_v(f.as<LogAbsF>().arg, 0, true); break;
    case 5: {
        const auto& li = f.as<LogIntegralF>();
        // crossings of the center with the limits are log-type kinks
        solve_in_v(li.center - li.lower, 0, false);
        solve_in_v(li.center - li.upper, 0, false);
        break;
    }
    default: break;
    }
}

} // namespace

double eval_log_integral(const LogIntegralF& li, const std::map<std::string, double>& assignment,
                         double tol) {
    double A = li.lower.eval(assignment);
    double B = li.upper.eval(assignment);
    if (A == B) return 0.0;
    double sign = 1.0;
    if (B < A) {
        std::swap(A, B);
        sign = -1.0;
    }
    const double c = li.center.eval(assignment);
    const double scale = 1.0 + std::abs(A) + std::abs(B);

    DistTerm wterm{PiCoeff(1), li.weight};
    auto assign_w = assignment;
    auto w = [&](double tv) {
        assign_w[li.bound.name] = tv;
        return evaluate_term_pointwise(wterm, assign_w, 1e-300);
    };

    // interior singular points of the weight
    std::vector<SingularPoint> pts;
    for (size_t i = 0; i < li.weight.size(); ++i)
        collect_candidates(li.weight[i], li.bound, assignment, {}, i, pts);

    std::vector<double> splits;
    for (const auto& p : pts) {
        if (p.x > A + 1e-13 * scale && p.x < B - 1e-13 * scale) splits.push_back(p.x);
        if (p.degree >= 1)
            throw NonConvergent("residual integral weight carries a pole in the bound variable");
    }
    auto near_boundary = [&](double x) {
        return std::abs(x - A) <= 1e-13 * scale || std::abs(x - B) <= 1e-13 * scale;
    };
    bool grade_A = false, grade_B = false;
    for (const auto& p : pts) {
        if (std::abs(p.x - A) <= 1e-13 * scale) grade_A = true;
        if (std::abs(p.x - B) <= 1e-13 * scale) grade_B = true;
    }

    const double quad_tol = std::max(tol, 1e-13);
    double total = 0.0;

    auto conventional = [&](const engine::Fn1& f, bool gA, bool gB) {
        std::vector<double> ss = splits;
        std::sort(ss.begin(), ss.end());
        ss.erase(std::unique(ss.begin(), ss.end(),
                             [&](double x, double y) { return std::abs(x - y) < 1e-13 * scale; }),
                 ss.end());
        double lo = A;
        double acc = 0.0;
        for (size_t i = 0; i <= ss.size(); ++i) {
            double hi = i < ss.size() ? ss[i] : B;
            if (hi <= lo) continue;
            const bool ga = (lo == A) ? gA : true;
            const bool gb = (hi == B) ? gB : true;
            acc += engine::graded(f, lo, hi, ga, gb, quad_tol).value;
            lo = hi;
        }
        return acc;
    };

    if (li.kernel_degree == 0) {
        engine::Fn1 f = [&](double tv) { return std::log(std::abs(tv - c)) * w(tv); };
        if (c > A + 1e-13 * scale && c < B - 1e-13 * scale) splits.push_back(c);
        const bool gA = grade_A || std::abs(c - A) <= 1e-13 * scale;
        const bool gB = grade_B || std::abs(c - B) <= 1e-13 * scale;
        total = conventional(f, gA, gB);
        return sign * total;
    }

    // finite-part kernels
    const int m = li.kernel_degree;
    if (near_boundary(c))
        throw NonConvergent("finite-part residual with the pole at an integration limit");

    engine::Fn1 full = [&](double tv) { return w(tv) / std::pow(tv - c, m); };

    if (c < A || c > B) {
        total = conventional(full, grade_A || std::abs(c - A) < 0.1 * (B - A),
                             grade_B || std::abs(c - B) < 0.1 * (B - A));
        return sign * total;
    }

    if (m == 1) {
        // principal value: paired window around c, conventional outside
        double d = std::min(c - A, B - c);
        for (double s : splits) d = std::min(d, std::abs(s - c));
        d *= 0.5;
        total += engine::pv_paired(w, c, d, quad_tol).value;
        std::vector<double> ss = splits;
        ss.push_back(c - d);
        ss.push_back(c + d);
        std::sort(ss.begin(), ss.end());
        double lo = A;
        for (size_t i = 0; i <= ss.size(); ++i) {
            double hi = i < ss.size() ? ss[i] : B;
            if (hi <= lo + 1e-300) {
                lo = hi;
                continue;
            }
            if (lo >= c - d - 1e-13 * scale && hi <= c + d + 1e-13 * scale) {
                lo = hi;
                continue; // inside the paired window
            }
            const bool ga = (lo == A) ? grade_A : true;
            const bool gb = (hi == B) ? grade_B : true;
            total += engine::graded(full, lo, hi, ga, gb, quad_tol).value;
            lo = hi;
        }
        return sign * total;
    }

    // m >= 2: Taylor subtraction with exact symbolic weight derivatives.
    std::vector<double> tay(m + 1, 0.0);
    auto assign_c = assignment;
    assign_c[li.bound.name] = c;
    for (int j = 0; j <= m; ++j) {
        DistExpr dj = differentiate_times(wterm, li.bound, j);
        double s = 0.0;
        for (const auto& dt : dj.terms) s += evaluate_term_pointwise(dt, assign_c, 1e-300);
        tay[j] = s / Rational::factorial(j).to_double();
    }
    auto head = [&](double tv) {
        double s = 0.0, p = 1.0;
        for (int j = 0; j < m; ++j) {
            s += tay[j] * p;
            p *= (tv - c);
        }
        return s;
    };
    engine::Fn1 subtracted = [&](double tv) {
        const double dx = tv - c;
        if (std::abs(dx) < 1e-5 * scale) return tay[m];
        return (w(tv) - head(tv)) / std::pow(dx, m);
    };
    total = conventional(subtracted, grade_A, grade_B);
    for (int j = 0; j < m; ++j)
        if (tay[j] != 0.0) total += tay[j] * fp_power_engine(j - m, c, A, B);
    return sign * total;
}

// ---------------------------------------------------------------------------
// Nested numeric integration

namespace {

struct NestedTerm {
    DistTerm term;
    std::vector<bool> consumed; // per spec step
};

// Collapse every delta against the step that integrates it.
void collapse_deltas(std::vector<NestedTerm>& work, const IntegrationSpec& spec, size_t from) {
    for (size_t w = 0; w < work.size();) {
        NestedTerm nt = work[w];
        bool rewrote = false;
        for (size_t fi = 0; fi < nt.term.factors.size() && !rewrote; ++fi) {
            if (!nt.term.factors[fi].is<DeltaF>()) continue;
            const auto& d = nt.term.factors[fi].as<DeltaF>();
            // earliest unconsumed step whose variable appears in the argument
            for (size_t si = from; si < spec.steps.size(); ++si) {
                if (nt.consumed[si] || !d.arg.depends_on(spec.steps[si].var)) continue;
                const Var& v = spec.steps[si].var;
                const Rational gamma = d.arg.coeff(v);
                const Affine c = Affine(v) - d.arg.scaled(Rational(1) / gamma);
                const int k = d.order;
                if (c == spec.steps[si].lower || c == spec.steps[si].upper)
                    throw DeltaAtEndpoint("delta point coincides with an integration limit",
                                          static_cast<int>(si));
                DistTerm rest = without_factor(nt.term, fi);
                rest.coeff *= PiCoeff(Rational(1) / (gamma.pow(k) * gamma.abs()));
                if (k % 2 != 0) rest.coeff = -rest.coeff;
                DistExpr derivs = differentiate_times(rest, v, k);
                for (const auto& dt : derivs.terms) {
                    NestedTerm sub;
                    sub.term = substitute(dt, v, c);
                    sub.term.factors.push_back(make_theta(spec.steps[si].upper - c));
                    sub.term.factors.push_back(make_theta(c - spec.steps[si].lower));
                    sub.consumed = nt.consumed;
                    sub.consumed[si] = true;
                    work.push_back(std::move(sub));
                }
                rewrote = true;
                break;
            }
        }
        if (rewrote) {
            work.erase(work.begin() + static_cast<long>(w));
        } else {
            ++w;
        }
    }
}

struct NestedEvaluator {
    const IntegrationSpec& spec;
    size_t from;
    const IntegrateOptions& opts;
    double err = 0.0;

    double value(const NestedTerm& nt, const std::map<std::string, double>& params) {
        return level(nt, static_cast<long>(spec.steps.size()) - 1, params);
    }

    double level(const NestedTerm& nt, long idx, std::map<std::string, double> assignment) {
        // skip consumed steps
        while (idx >= static_cast<long>(from) && nt.consumed[static_cast<size_t>(idx)]) --idx;
        if (idx < static_cast<long>(from)) {
            // graded panels probe exponentially close to integrable
            // singularities; only exact hits are singular here
            return evaluate_term_pointwise(nt.term, assignment, 1e-300);
        }

        const auto& st = spec.steps[static_cast<size_t>(idx)];
        const Var& v = st.var;
        double A = st.lower.eval(assignment);
        double B = st.upper.eval(assignment);
        double sign = 1.0;
        if (A == B) return 0.0;
        if (B < A) {
            std::swap(A, B);
            sign = -1.0;
        }
        const double scale = 1.0 + std::abs(A) + std::abs(B);

        // numeric guard clipping
        for (const auto& f : nt.term.factors) {
            if (!f.is<HeavisideF>()) continue;
            const auto& h = f.as<HeavisideF>();
            const Rational alpha = h.arg.coeff(v);
            if (alpha.is_zero()) continue;
            Affine rest = h.arg - Affine(v).scaled(alpha);
            bool evaluable = true;
            for (const auto& [wv, cw] : rest.coeffs())
                if (!assignment.count(wv.name)) evaluable = false;
            if (!evaluable) continue;
            const double cross = -rest.eval(assignment) / alpha.to_double();
            if (alpha.sign() > 0) {
                A = std::max(A, cross);
            } else {
                B = std::min(B, cross);
            }
        }
        if (A >= B) return 0.0;

        // inner step limits for crossing probes
        std::vector<std::pair<std::string, std::pair<double, double>>> inner;
        for (long j = static_cast<long>(from); j < idx; ++j) {
            if (nt.consumed[static_cast<size_t>(j)]) continue;
            const auto& stj = spec.steps[static_cast<size_t>(j)];
            bool ok = true;
            for (const auto& [wv, cw] : stj.lower.coeffs())
                if (!assignment.count(wv.name) && wv != v) ok = false;
            for (const auto& [wv, cw] : stj.upper.coeffs())
                if (!assignment.count(wv.name) && wv != v) ok = false;
            if (!ok) continue;
            auto asg = assignment;
            asg[v.name] = 0.5 * (A + B); // probe; only used when limits don't involve v
            inner.push_back({stj.var.name, {stj.lower.eval(asg), stj.upper.eval(asg)}});
        }

        std::vector<SingularPoint> pts;
        for (size_t i = 0; i < nt.term.factors.size(); ++i)
            collect_candidates(nt.term.factors[i], v, assignment, inner, i, pts);

        // separate true poles (explicit, evaluable) from split/grade points
        std::vector<SingularPoint> poles;
        std::vector<double> splits;
        bool grade_A = false, grade_B = false;
        for (const auto& p : pts) {
            if (p.degree >= 1 && p.x > A + 1e-12 * scale && p.x < B - 1e-12 * scale) {
                poles.push_back(p);
            } else if (p.x > A + 1e-12 * scale && p.x < B - 1e-12 * scale) {
                splits.push_back(p.x);
            } else if (std::abs(p.x - A) <= 1e-12 * scale) {
                if (p.degree >= 1)
                    throw NonConvergent("pole at an integration limit in numeric fallback");
                grade_A = true;
            } else if (std::abs(p.x - B) <= 1e-12 * scale) {
                if (p.degree >= 1)
                    throw NonConvergent("pole at an integration limit in numeric fallback");
                grade_B = true;
            }
        }
        std::sort(poles.begin(), poles.end(),
                  [](const SingularPoint& x, const SingularPoint& y) { return x.x < y.x; });

        auto integrand = [&](double tv) {
            auto asg = assignment;
            asg[v.name] = tv;
            return level(nt, idx - 1, asg);
        };

        double total = 0.0;
        std::vector<std::pair<double, double>> windows; // PV windows to skip

        for (const auto& p : poles) {
            double d = std::min(p.x - A, B - p.x);
            for (const auto& q : poles)
                if (q.x != p.x) d = std::min(d, 0.5 * std::abs(q.x - p.x));
            for (double s : splits) d = std::min(d, std::abs(s - p.x));
            d *= 0.5;
            if (d <= 0) throw NonConvergent("coincident singular points in numeric fallback");

            if (p.degree == 1) {
                // rest(v) = integrand * (v - p): scaling back the pole factor
                engine::Fn1 restf = [&](double tv) {
                    auto asg = assignment;
                    asg[v.name] = tv;
                    double val = level(nt, idx - 1, asg);
                    return val * (tv - p.x);
                };
                total += engine::pv_paired(restf, p.x, d, opts.quad_tol).value;
            } else {
                // finite part by Taylor subtraction with symbolic derivatives
                const int m = p.degree;
                // inner limits must not depend on v for the symbolic derivative
                for (long j = static_cast<long>(from); j < idx; ++j) {
                    if (nt.consumed[static_cast<size_t>(j)]) continue;
                    const auto& stj = spec.steps[static_cast<size_t>(j)];
                    if (stj.lower.depends_on(v) || stj.upper.depends_on(v))
                        throw NonConvergent(
                            "finite-part step with variable inner limits unsupported");
                }
                DistTerm rest = without_factor(nt.term, p.factor_index);
                std::vector<double> tay(m + 1, 0.0);
                for (int j = 0; j <= m; ++j) {
                    DistExpr dj = differentiate_times(rest, v, j);
                    double s = 0.0;
                    for (const auto& dt : dj.terms) {
                        NestedTerm sub{dt, nt.consumed};
                        auto asg = assignment;
                        asg[v.name] = p.x;
                        s += level(sub, idx - 1, asg);
                    }
                    tay[j] = s / Rational::factorial(j).to_double();
                }
                NestedTerm restnt{rest, nt.consumed};
                auto head = [&](double tv) {
                    double s = 0.0, q = 1.0;
                    for (int j = 0; j < m; ++j) {
                        s += tay[j] * q;
                        q *= (tv - p.x);
                    }
                    return s;
                };
                engine::Fn1 subt = [&](double tv) {
                    const double dx = tv - p.x;
                    auto asg = assignment;
                    asg[v.name] = tv;
                    if (std::abs(dx) < 1e-5 * scale) return tay[m];
                    return (level(restnt, idx - 1, asg) - head(tv)) / std::pow(dx, m);
                };
                total += engine::refine(subt, p.x - d, p.x + d, opts.quad_tol).value;
                for (int j = 0; j < m; ++j)
                    if (tay[j] != 0.0)
                        total += tay[j] * fp_power_engine(j - m, p.x, p.x - d, p.x + d);
            }
            windows.push_back({p.x - d, p.x + d});
        }

        // conventional panels outside the PV/FP windows
        std::vector<double> cuts = splits;
        for (auto& [wa, wb] : windows) {
            cuts.push_back(wa);
            cuts.push_back(wb);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [&](double x, double y) { return std::abs(x - y) < 1e-13 * scale; }),
                   cuts.end());
        double lo = A;
        for (size_t i = 0; i <= cuts.size(); ++i) {
            double hi = i < cuts.size() ? cuts[i] : B;
            if (hi <= lo + 1e-300) {
                lo = hi;
                continue;
            }
            bool in_window = false;
            for (auto& [wa, wb] : windows)
                if (lo >= wa - 1e-13 * scale && hi <= wb + 1e-13 * scale) in_window = true;
            if (!in_window) {
                const bool ga = (lo == A) ? grade_A : true;
                const bool gb = (hi == B) ? grade_B : true;
                auto o = engine::graded(integrand, lo, hi, ga, gb, opts.quad_tol);
                total += o.value;
                err += o.err;
            }
            lo = hi;
        }
        return sign * total;
    }
};

} // namespace

IntegralValue numeric_nested(const std::vector<DistTerm>& terms, const IntegrationSpec& spec,
                             size_t from, const std::map<std::string, double>& params,
                             const IntegrateOptions& opts) {
    std::vector<NestedTerm> work;
    for (const auto& t : terms)
        work.push_back({t, std::vector<bool>(spec.steps.size(), false)});
    collapse_deltas(work, spec, from);

    IntegralValue out;
    for (const auto& nt : work) {
        // constant-fold guards etc. before evaluating
        DistExpr n = normalize(DistExpr::single(nt.term));
        for (const auto& t2 : n.terms) {
            NestedTerm run{t2, nt.consumed};
            NestedEvaluator ev{spec, from, opts};
            out.value += ev.value(run, params);
            out.error_estimate += ev.err;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orchestration

IntegralValue repeated_integrate(const DistExpr& e, const IntegrationSpec& spec_in,
                                 const SmoothPtr& u, const std::map<std::string, double>& params,
                                 const IntegrateOptions& opts) {
    IntegrationSpec spec = spec_in;
    spec.validate();

    DistExpr cur = e;
    if (u) {
        double cv;
        if (!u->is_constant(&cv) || cv != 1.0) {
            if (u->arity() != static_cast<int>(spec.steps.size()))
                throw Error("test function arity must match the number of steps");
            std::vector<Affine> args;
            for (const auto& st : spec.steps) args.emplace_back(st.var);
            DistExpr weighted;
            for (const auto& t : cur.terms) {
                DistTerm nt = t;
                nt.factors.push_back(make_smooth(u, args));
                weighted.terms.push_back(std::move(nt));
            }
            cur = std::move(weighted);
        }
    }

    // map infinite limits to the test function's support
    for (size_t i = 0; i < spec.steps.size(); ++i) {
        auto& st = spec.steps[i];
        if (st.lower_infinite || st.upper_infinite) {
            double lo = 0.0, hi = 1.0;
            if (u) {
                auto s = u->support(static_cast<int>(i));
                lo = s.first;
                hi = s.second;
            }
            if (st.lower_infinite) {
                st.lower = Affine(Rational(static_cast<int64_t>(lo)));
                st.lower_infinite = false;
            }
            if (st.upper_infinite) {
                st.upper = Affine(Rational(static_cast<int64_t>(hi)));
                st.upper_infinite = false;
            }
        }
    }

    cur = normalize(cur);
    IntegralValue total;
    for (size_t i = 0; i < spec.steps.size(); ++i) {
        StepResult sr =
            integrate_step(cur, spec.steps[i].var, spec.steps[i].lower, spec.steps[i].upper,
                           static_cast<int>(i));
        if (!sr.numeric.empty()) {
            IntegralValue nv = numeric_nested(sr.numeric, spec, i, params, opts);
            total.value += nv.value;
            total.error_estimate += nv.error_estimate;
        }
        cur = sr.symbolic;
    }

    for (const auto& t : cur.terms) {
        total.value += evaluate_term_pointwise(t, params, opts.singular_tol);
        total.error_estimate += 1e-13 * std::abs(total.value);
    }
    return total;
}

} // namespace vpcalc
