#include "vpcalc/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vpcalc/dsl.hpp"
#include "vpcalc/errors.hpp"
#include "vpcalc/integrate.hpp"
#include "vpcalc/quadrature.hpp"
#include "vpcalc/reduction.hpp"

namespace vpcalc::scenarios {

namespace {

constexpr double kPi2 = 9.869604401089358;  // pi^2
constexpr double kPi2over3 = kPi2 / 3.0;

using Clock = std::chrono::steady_clock;

struct Timer {
    Clock::time_point start = Clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
};

ScenarioReport report(std::string name, double computed, double expected,
                      std::string expected_repr, double tol, double ms, std::string note = "") {
    ScenarioReport r;
    r.name = std::move(name);
    r.computed = computed;
    r.expected = expected;
    r.expected_repr = std::move(expected_repr);
    r.abs_error = std::abs(computed - expected);
    r.tolerance = tol;
    r.passed = r.abs_error <= tol;
    r.runtime_ms = ms;
    r.note = std::move(note);
    return r;
}

double fmt_g(double) = delete; // printing goes through snprintf below

std::string num15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

SmoothPtr unit_fn(int arity) { return std::make_shared<ConstFn>(Rational(1), arity); }

// g(t) = int_0^1 VP dz/(t-z) computed by the oracle's excision quadrature.
double oracle_g(double t) {
    auto q = quad::pv_quad([](double) { return 1.0; }, t, 1, 0.0, 1.0);
    return -q.value; // kernel 1/(t-z) = -1/(z-t)
}

std::shared_ptr<const PolySmooth> permuted_poly(const PolySmooth& p,
                                                const std::vector<int>& perm) {
    PolySmooth::Monomials m;
    for (const auto& [key, c] : p.monomials()) {
        std::vector<int> k(key.size());
        for (size_t i = 0; i < key.size(); ++i) k[perm[i]] = key[i];
        m[k] = c;
    }
    return std::make_shared<PolySmooth>(p.arity(), std::move(m), "u");
}

} // namespace

// ---------------------------------------------------------------------------
// Cube determination of the delta-chain constant

std::vector<ScenarioReport> cube_c2_determination(double tol) {
    std::vector<ScenarioReport> out;

    Timer t1;
    auto regular = quad::multiple_integral_regular({1, 1}, unit_fn(3), 0.0, 1.0, tol * 0.1);
    out.push_back(report("01_cube_regular_order", regular.value, kPi2over3, "pi^2/3", tol,
                         t1.ms()));

    // bracket term: int dz1 dz2 dx VP 1/(z1-z2) [VP 1/(x-z1) - VP 1/(x-z2)]
    Timer t2;
    quad::RealFn H = [&](double z1) {
        const double gz1 = oracle_g(z1);
        auto q = quad::pv_quad([&](double z2) { return gz1 - oracle_g(z2); }, z1, 1, 0.0, 1.0);
        return q.value;
    };
    auto bracket = quad::tanh_sinh(H, 0.0, 1.0, 1e-10);
    out.push_back(report("01_cube_bracket_term", bracket.value, -2.0 * kPi2 / 3.0, "-2*pi^2/3",
                         tol, t2.ms()));

    // I_regular = I_bracket + C2 * (int of the delta chain over the cube = 1)
    Timer t3;
    const double c2 = regular.value - bracket.value;
    out.push_back(report("01_cube_inferred_c2", c2, kPi2, "pi^2", tol * 10.0, t3.ms()));
    return out;
}

// ---------------------------------------------------------------------------
// Simplex integral

double simplex_route_a(double z) {
    if (!(z > 0)) throw DomainError("route A closed form requires z > 0");
    const double l = std::log(z);
    return 2.0 * quad::dilog(1.0 + 1.0 / z) + l * l - kPi2 / 6.0;
}

double simplex_route_b(double z) {
    if (!(z > -1)) throw DomainError("route B closed form requires z > -1");
    if (z == 0) throw ThresholdUndefined("simplex integral undefined at the threshold z = 0");
    const double theta = z > 0 ? 1.0 : 0.0;
    return -2.0 * quad::dilog(1.0 + z) + kPi2 / 2.0 - kPi2 * theta;
}

double simplex_pipeline(double z, double quad_tol) {
    if (z == 0) throw ThresholdUndefined("simplex integral undefined at the threshold z = 0");
    static const DistExpr integrand =
        dsl::parse_expr("- VP[1/(eta + 1/2*xi - 1)] * VP[1/(eta - 1/2*xi + 1)]");
    static const IntegrationSpec spec =
        IntegrationSpec::parse("eta=-1/2*xi..1/2*xi; xi=0..2+z");
    IntegrateOptions opts;
    opts.quad_tol = quad_tol;
    return repeated_integrate(integrand, spec, nullptr, {{"z", z}}, opts).value;
}

double simplex_oracle(double z, double tol) {
    if (!(z > -1)) throw DomainError("simplex oracle requires z > -1");
    if (z == 0) throw ThresholdUndefined("simplex integral undefined at the threshold z = 0");
    const double top = 2.0 + z;
    const double logpt = 1.0 + z; // inner integral behaves like ln|1+z-x| near x = 1+z

    quad::RealFn w = [&](double x) {
        const double B = top - x;
        if (B <= 0) return 0.0;
        if (B > 1.0) {
            auto q = quad::pv_quad([](double) { return 1.0; }, 1.0, 1, 0.0, B);
            return q.value;
        }
        // pole outside: conventional integral of 1/(y-1) on [0, B]
        auto q = quad::tanh_sinh([&](double y) { return 1.0 / (y - 1.0); }, 0.0, B, tol * 1e-2);
        return q.value;
    };

    // outer: PV around x = 1, log point at x = 1+z
    const double d = std::min({0.45, std::abs(z) * 0.5, (top - 1.0) * 0.5, 0.5});
    double total = 0.0;
    auto pv = quad::pv_quad(w, 1.0, 1, 1.0 - d, 1.0 + d,
                            quad::PvOptions{.eps0 = 0, .schedule_terms = 8, .target = 1e-8,
                                            .panel_tol = tol * 1e-2});
    total += pv.value;

    quad::RealFn full = [&](double x) { return w(x) / (x - 1.0); };
    std::vector<double> cuts;
    if (logpt > 1e-12 && logpt < top - 1e-12 && (logpt < 1.0 - d || logpt > 1.0 + d))
        cuts.push_back(logpt);
    cuts.push_back(1.0 - d);
    cuts.push_back(1.0 + d);
    std::sort(cuts.begin(), cuts.end());
    double lo = 0.0;
    for (size_t i = 0; i <= cuts.size(); ++i) {
        double hi = i < cuts.size() ? cuts[i] : top;
        if (hi <= lo + 1e-15) {
            lo = hi;
            continue;
        }
        if (!(lo >= 1.0 - d - 1e-13 && hi <= 1.0 + d + 1e-13))
            total += quad::tanh_sinh(full, lo, hi, tol * 1e-2).value;
        lo = hi;
    }
    return total;
}

std::vector<ScenarioReport> simplex_I(double z, Route route, bool one_sided) {
    std::vector<ScenarioReport> out;
    if (z == 0.0) {
        if (!one_sided) throw ThresholdUndefined("simplex integral undefined at z = 0");
        Timer t;
        const double eps = 1e-10;
        const double plus = simplex_route_b(eps);
        const double minus = simplex_route_b(-eps);
        out.push_back(report("simplex_limit_plus", plus, kPi2 / 2.0 - kPi2, "pi^2/2 - pi^2",
                             1e-9, t.ms()));
        out.push_back(report("simplex_limit_minus", minus, kPi2 / 2.0, "pi^2/2", 1e-9, t.ms()));
        out.push_back(report("simplex_jump", plus - minus, -kPi2, "-pi^2", 1e-9, t.ms()));
        return out;
    }

    const bool want_a = (route == Route::A || route == Route::Both) && z > 0;
    const bool want_b = route == Route::B || route == Route::Both || !want_a;
    double ref = want_b ? simplex_route_b(z) : simplex_route_a(z);

    if (want_a) {
        Timer t;
        const double a = simplex_route_a(z);
        out.push_back(report("simplex_route_a", a, ref, "route B closed form", 1e-10, t.ms()));
    }
    if (want_b) {
        Timer t;
        const double b = simplex_route_b(z);
        out.push_back(report("simplex_route_b", b, ref, "closed form", 1e-12, t.ms()));
    }
    if (route == Route::Both) {
        Timer t1;
        const double pipe = simplex_pipeline(z);
        out.push_back(
            report("simplex_pipeline", pipe, ref, "route B closed form", 1e-6, t1.ms()));
        Timer t2;
        const double orc = simplex_oracle(z);
        out.push_back(report("simplex_oracle", orc, ref, "route B closed form", 1e-6, t2.ms()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random expressions for the property suites

namespace {

const char* kVarPool[5] = {"x", "y", "z1", "z2", "z3"};

Var random_var(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> vidx(0, 4);
    return Var(kVarPool[vidx(rng)]);
}

Affine random_affine(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> cnum(-4, 4);
    std::uniform_int_distribution<int> cden(1, 3);
    Affine a(random_var(rng));
    const int s = cnum(rng);
    if (s > 1) {
        Rational c(s, cden(rng));
        a = a.scaled(c);
    }
    const int t = cnum(rng);
    if (t > 0) a += Affine(random_var(rng)).scaled(Rational(t));
    a += Affine(Rational(cnum(rng), 2));
    if (a.is_constant()) a += Affine(random_var(rng));
    return a;
}

} // namespace

DistExpr random_expr(std::mt19937_64& rng, int max_terms) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> nfactors(0, 3);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<int> cnum(-4, 4);
    std::uniform_int_distribution<int> cden(1, 3);
    std::uniform_int_distribution<int> order(0, 2);
    std::uniform_int_distribution<int> degree(1, 3);
    std::uniform_int_distribution<int> pipow(0, 2);

    DistExpr e;
    const int T = nterms(rng);
    for (int t = 0; t < T; ++t) {
        DistTerm term;
        Rational c(cnum(rng), cden(rng));
        if (c.is_zero()) c = Rational(1);
        term.coeff = PiCoeff::pi2(pipow(rng), c);
        const int F = nfactors(rng);
        for (int f = 0; f < F; ++f) {
            switch (kind(rng)) {
            case 0: term.factors.push_back(make_delta(order(rng), random_affine(rng))); break;
            case 1: term.factors.push_back(make_vp(random_affine(rng), degree(rng))); break;
            case 2: term.factors.push_back(make_log(random_affine(rng))); break;
            case 3: term.factors.push_back(make_theta(random_affine(rng))); break;
            default: {
                Affine a1(random_var(rng));
                Affine a2(random_var(rng));
                term.factors.push_back(make_smooth(dsl::symbolic_function("u", 2), {a1, a2}));
                break;
            }
            }
        }
        e.terms.push_back(std::move(term));
    }
    return e;
}

// ---------------------------------------------------------------------------
// The verification suite

namespace {

void run_cube(std::vector<ScenarioReport>& out, double scale) {
    auto rs = cube_c2_determination(1e-6 * scale);
    for (auto& r : rs) out.push_back(r);
}

void run_reduction_defining_property(std::vector<ScenarioReport>& out, double scale) {
    Timer t;
    const Var x("x");
    DistExpr red = reduce_pair_simple(x, Affine(Var("z1")), Affine(Var("z2")));
    auto spec = IntegrationSpec::parse("x=0..1; z1=0..1; z2=0..1");
    auto v = repeated_integrate(red, spec);
    out.push_back(report("02_reduction_defining_property", v.value, kPi2over3, "pi^2/3",
                         1e-7 * scale, t.ms()));
}

void run_order_independence(std::vector<ScenarioReport>& out, double scale,
                            unsigned long seed) {
    const auto specA = IntegrationSpec::parse("x=0..1; z=0..1");
    const auto specB = IntegrationSpec::parse("z=0..1; x=0..1");
    for (int n = 1; n <= 3; ++n) {
        Timer t;
        std::mt19937_64 rng(seed + n);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            auto u = random_test_poly(rng, 2, 4, 2);
            DistExpr e = DistExpr::single(PiCoeff(1), {make_vp(Var("x") - Var("z"), n)});
            const double a = repeated_integrate(e, specA, u).value;
            const double b =
                repeated_integrate(e, specB, permuted_poly(*u, {1, 0})).value;
            worst = std::max(worst, std::abs(a - b));
        }
        out.push_back(report("03_order_independence_n" + std::to_string(n), worst, 0.0,
                             "0 (orders agree)", 1e-7 * scale, t.ms()));
    }
}

void run_pair_degrees(std::vector<ScenarioReport>& out, double scale, unsigned long seed) {
    const std::vector<std::pair<int, int>> combos = {{2, 1}, {1, 2}, {2, 2}};
    const auto spec = IntegrationSpec::parse("x=0..1; z1=0..1; z2=0..1");
    const Var x("x");
    for (auto [n1, n2] : combos) {
        Timer t;
        std::mt19937_64 rng(seed + 100 * n1 + n2);
        DistExpr red = reduce_pair_general(x, Affine(Var("z1")), n1, Affine(Var("z2")), n2);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            auto u = random_test_poly(rng, 3, 4, 2);
            const double engine = repeated_integrate(red, spec, u).value;
            const double oracle =
                quad::multiple_integral_regular({n1, n2}, u, 0.0, 1.0, 1e-7).value;
            worst = std::max(worst, std::abs(engine - oracle));
        }
        out.push_back(report("04_pair_degrees_" + std::to_string(n1) + "_" + std::to_string(n2),
                             worst, 0.0, "0 (engine = oracle)", 1e-5 * scale, t.ms()));
    }
}

DistExpr three_pole_closed_form() {
    const Affine x(Var("x"));
    const std::vector<Affine> z = {Affine(Var("z1")), Affine(Var("z2")), Affine(Var("z3"))};
    DistExpr e;
    for (int n = 0; n < 3; ++n) {
        std::vector<int> others;
        for (int k = 0; k < 3; ++k)
            if (k != n) others.push_back(k);
        {
            DistTerm t{PiCoeff(1),
                       {make_vp(x - z[n], 1), make_vp(z[n] - z[others[0]], 1),
                        make_vp(z[n] - z[others[1]], 1)}};
            e.terms.push_back(t);
        }
        {
            DistTerm t{PiCoeff::pi2(1, Rational(-1, 3)),
                       {make_vp(x - z[n], 1), make_delta(0, z[n] - z[others[0]]),
                        make_delta(0, z[n] - z[others[1]])}};
            e.terms.push_back(t);
        }
        {
            DistTerm t{PiCoeff::pi2(1),
                       {make_vp(x - z[n], 1), make_delta(0, x - z[others[0]]),
                        make_delta(0, x - z[others[1]])}};
            e.terms.push_back(t);
        }
    }
    return e;
}

void run_three_pole(std::vector<ScenarioReport>& out, double scale) {
    const Var x("x");
    {
        Timer t;
        DistExpr rec = reduce_product(
            x, {{Affine(Var("z1")), 1}, {Affine(Var("z2")), 1}, {Affine(Var("z3")), 1}});
        DistExpr closed = reduce_in_var(three_pole_closed_form(), x);
        const bool equal = expr_equal(rec, closed);
        out.push_back(report("05_three_pole_structural", equal ? 0.0 : 1.0, 0.0,
                             "structural match", 0.5, t.ms(),
                             equal ? "recursion equals the symmetric closed form"
                                   : "structural mismatch"));
    }
    {
        Timer t;
        DistExpr rec = reduce_product(
            x, {{Affine(Var("z1")), 1}, {Affine(Var("z2")), 1}, {Affine(Var("z3")), 1}});
        auto spec = IntegrationSpec::parse("x=0..1; z1=0..1; z2=0..1; z3=0..1");
        const double engine = repeated_integrate(rec, spec).value;
        const double oracle =
            quad::multiple_integral_regular({1, 1, 1}, unit_fn(4), 0.0, 1.0, 1e-7).value;
        out.push_back(report("05_three_pole_cube", engine, oracle, "regular-order oracle",
                             1e-5 * scale, t.ms()));
    }
}

void run_four_pole(std::vector<ScenarioReport>& out, double scale) {
    Timer t;
    const Var x("x");
    DistExpr rec = reduce_product(x, {{Affine(Var("z1")), 1},
                                      {Affine(Var("z2")), 1},
                                      {Affine(Var("z3")), 1},
                                      {Affine(Var("z4")), 1}});
    auto spec = IntegrationSpec::parse("x=0..1; z1=0..1; z2=0..1; z3=0..1; z4=0..1");
    const double engine = repeated_integrate(rec, spec).value;
    const double oracle =
        quad::multiple_integral_regular({1, 1, 1, 1}, unit_fn(5), 0.0, 1.0, 1e-6).value;
    out.push_back(
        report("06_four_pole_cube", engine, oracle, "regular-order oracle", 1e-4 * scale, t.ms(),
               "long-running"));
}

void run_simplex(std::vector<ScenarioReport>& out, double scale) {
    {
        Timer t;
        double worst = 0.0;
        for (double z : {0.25, 0.5, 1.0, 2.0, 5.0})
            worst = std::max(worst, std::abs(simplex_route_a(z) - simplex_route_b(z)));
        out.push_back(report("07_simplex_routes_agree", worst, 0.0, "0 (routes agree)",
                             1e-10 * scale, t.ms()));
    }
    {
        Timer t;
        out.push_back(report("07_simplex_value_at_1", simplex_route_b(1.0), -kPi2over3,
                             "-pi^2/3", 1e-10 * scale, t.ms()));
    }
    {
        Timer t;
        const double eps = 1e-10;
        const double jump = simplex_route_b(eps) - simplex_route_b(-eps);
        out.push_back(
            report("07_simplex_delta_jump", jump, -kPi2, "-pi^2", 1e-9 * scale, t.ms(),
                   "delta-chain contribution flips from 0 to pi^2 across the threshold"));
    }
    {
        Timer t;
        double worst = 0.0;
        for (double z : {0.5, 1.0, 2.0}) {
            const double ref = simplex_route_b(z);
            const double pipe = simplex_pipeline(z);
            const double orc = simplex_oracle(z);
            worst = std::max({worst, std::abs(pipe - ref), std::abs(orc - ref),
                              std::abs(pipe - orc)});
        }
        out.push_back(report("07_simplex_pipeline_vs_oracle", worst, 0.0,
                             "0 (pipeline = closed forms = oracle)", 1e-6 * scale, t.ms()));
    }
}

void run_dilog(std::vector<ScenarioReport>& out, double scale) {
    {
        Timer t;
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double z = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
            const double l = std::log(z);
            const double resid = 2.0 * quad::dilog(1.0 + 1.0 / z) + 2.0 * quad::dilog(1.0 + z) +
                                 l * l + kPi2 / 3.0;
            worst = std::max(worst, std::abs(resid));
        }
        out.push_back(report("08_dilog_identity", worst, 0.0, "0 (reflection identity)",
                             1e-10 * scale, t.ms()));
    }
    {
        Timer t;
        out.push_back(report("08_dilog_at_1", quad::dilog(1.0), 0.0, "0", 0.0, t.ms()));
    }
    {
        Timer t;
        out.push_back(report("08_dilog_at_2", quad::dilog(2.0), -kPi2 / 12.0, "-pi^2/12",
                             1e-12 * scale, t.ms()));
    }
}

void run_pv_fast_paths(std::vector<ScenarioReport>& out, double scale) {
    for (int n = 1; n <= 3; ++n) {
        Timer t;
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const double y = i / 11.0;
            auto q = quad::pv_quad([](double) { return 1.0; }, y, n, 0.0, 1.0);
            double closed;
            if (n == 1) {
                closed = std::log(std::abs(1.0 - y)) - std::log(std::abs(-y));
            } else {
                // -1/(n-1) [ (b-y)^-(n-1) - (a-y)^-(n-1) ]
                closed = -(std::pow(1.0 - y, 1 - n) - std::pow(-y, 1 - n)) / (n - 1.0);
            }
            worst = std::max(worst, std::abs(q.value - closed));
        }
        out.push_back(report("09_pv_fast_paths_n" + std::to_string(n), worst, 0.0,
                             "0 (excision = closed form)", 1e-9 * scale, t.ms()));
    }
}

void run_property_suites(std::vector<ScenarioReport>& out, double scale, unsigned long seed) {
    (void)scale;
    {
        Timer t;
        std::mt19937_64 rng(seed + 41);
        std::uniform_int_distribution<int> num(-99, 99);
        std::uniform_int_distribution<int> den(1, 30);
        std::uniform_int_distribution<int> pw(0, 3);
        auto rand_coeff = [&]() {
            PiCoeff c;
            for (int i = 0; i < 2; ++i) c += PiCoeff::pi2(pw(rng), Rational(num(rng), den(rng)));
            return c;
        };
        int failures = 0;
        for (int i = 0; i < 1000; ++i) {
            PiCoeff a = rand_coeff(), b = rand_coeff(), c = rand_coeff();
            if (!((a + b) + c == a + (b + c))) ++failures;
            if (!((a * b) * c == a * (b * c))) ++failures;
            if (!(a + b == b + a)) ++failures;
            if (!(a * b == b * a)) ++failures;
            if (!(a * (b + c) == a * b + a * c)) ++failures;
        }
        out.push_back(report("10_props_ring_axioms", failures, 0.0, "0 failures/1000", 0.5,
                             t.ms()));
    }
    {
        Timer t;
        std::mt19937_64 rng(seed + 42);
        int failures = 0;
        for (int i = 0; i < 1000; ++i) {
            try {
                DistExpr e = random_expr(rng);
                DistExpr n1 = normalize(e);
                DistExpr n2 = normalize(n1);
                if (!expr_equal(n1, n2)) ++failures;
            } catch (const Error&) {
                // singular constructions (undefined products) are skipped
            }
        }
        out.push_back(report("10_props_normalize_idempotent", failures, 0.0, "0 failures/1000",
                             0.5, t.ms()));
    }
    {
        Timer t;
        std::mt19937_64 rng(seed + 43);
        std::uniform_int_distribution<int> order(0, 2);
        std::uniform_int_distribution<int> pick(0, 2);
        int failures = 0;
        for (int i = 0; i < 1000; ++i) {
            const std::vector<std::string> zs = {"z1", "z2", "z3"};
            const Var x("x");
            Affine c1(Var(zs[pick(rng)]));
            Affine c2(Var(zs[pick(rng)]));
            if (c1 == c2) c2 += Affine(Rational(1));
            Factor d1 = make_delta(order(rng), Affine(x) - c1);
            Factor d2 = make_delta(order(rng), Affine(x) - c2);
            DistExpr a = DistExpr::single(PiCoeff(1), {d1, d2});
            DistExpr b = DistExpr::single(PiCoeff(1), {d2, d1});
            if (!expr_equal(normalize(a), normalize(b))) ++failures;
        }
        out.push_back(report("10_props_delta_chain_order", failures, 0.0, "0 failures/1000", 0.5,
                             t.ms()));
    }
    {
        Timer t;
        std::mt19937_64 rng(seed + 44);
        int failures = 0;
        for (int i = 0; i < 1000; ++i) {
            DistExpr e = random_expr(rng);
            std::string s = dsl::print_expr(e);
            DistExpr e2 = dsl::parse_expr(s);
            if (dsl::print_expr(e2) != s) ++failures;
        }
        out.push_back(report("10_props_printer_roundtrip", failures, 0.0, "0 failures/1000", 0.5,
                             t.ms()));
    }
}

} // namespace

std::vector<ScenarioReport> verify_suite(const VerifyOptions& opts) {
    std::vector<ScenarioReport> out;
    const double s = opts.tol_scale;
    auto guarded = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            ScenarioReport r;
            r.name = "error";
            r.computed = std::nan("");
            r.passed = false;
            r.note = e.what();
            out.push_back(r);
        }
    };
    guarded([&] { run_cube(out, s); });
    guarded([&] { run_reduction_defining_property(out, s); });
    guarded([&] { run_order_independence(out, s, opts.seed); });
    guarded([&] { run_pair_degrees(out, s, opts.seed); });
    guarded([&] { run_three_pole(out, s); });
    if (opts.include_slow) guarded([&] { run_four_pole(out, s); });
    guarded([&] { run_simplex(out, s); });
    guarded([&] { run_dilog(out, s); });
    guarded([&] { run_pv_fast_paths(out, s); });
    guarded([&] { run_property_suites(out, s, opts.seed); });

    std::stable_sort(out.begin(), out.end(),
                     [](const ScenarioReport& a, const ScenarioReport& b) { return a.name < b.name; });
    return out;
}

std::string to_csv(const std::vector<ScenarioReport>& reports) {
    std::string out = "name,computed,expected,abs_error,passed,runtime_ms\n";
    for (const auto& r : reports) {
        out += r.name + "," + num15(r.computed) + "," + num15(r.expected) + "," +
               num15(r.abs_error) + "," + (r.passed ? "1" : "0") + "," + num15(r.runtime_ms) +
               "\n";
    }
    return out;
}

std::string to_text(const std::vector<ScenarioReport>& reports) {
    std::string out;
    size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    for (const auto& r : reports) {
        char line[512];
        std::snprintf(line, sizeof(line), "%-5s %-*s computed=%- .12g expected=%- .12g err=%.3g tol=%.3g (%.0f ms)%s%s\n",
                      r.passed ? "PASS" : "FAIL", static_cast<int>(width), r.name.c_str(),
                      r.computed, r.expected, r.abs_error, r.tolerance, r.runtime_ms,
                      r.note.empty() ? "" : "  -- ", r.note.c_str());
        out += line;
    }
    int passed = 0;
    for (const auto& r : reports) passed += r.passed ? 1 : 0;
    out += std::to_string(passed) + "/" + std::to_string(reports.size()) + " scenarios passed\n";
    return out;
}

} // namespace vpcalc::scenarios
