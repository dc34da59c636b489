#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "vpcalc/dsl.hpp"
#include "vpcalc/errors.hpp"
#include "vpcalc/integrate.hpp"
#include "vpcalc/quadrature.hpp"
#include "vpcalc/reduction.hpp"
#include "vpcalc/scenarios.hpp"

namespace {

using namespace vpcalc;

std::string num15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

// 1-D polynomial in t, e.g. "1 - 2*t + 1/2*t^3".
SmoothPtr parse_poly1(const std::string& src) {
    PolySmooth::Monomials m;
    size_t pos = 0;
    auto skip = [&] {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    };
    auto fail = [&]() -> void {
        throw ParseError("bad polynomial at offset " + std::to_string(pos), 1,
                         static_cast<int>(pos) + 1, "polynomial monomial");
    };
    bool first = true;
    while (true) {
        skip();
        if (pos >= src.size()) break;
        int sign = 1;
        if (src[pos] == '+' || src[pos] == '-') {
            sign = src[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (!first) {
            fail();
        }
        skip();
        Rational c(1);
        bool have_c = false;
        if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            size_t s0 = pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            BigInt num(src.substr(s0, pos - s0));
            BigInt den(1);
            if (pos < src.size() && src[pos] == '/') {
                ++pos;
                size_t s1 = pos;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                    ++pos;
                if (s1 == pos) fail();
                den = BigInt(src.substr(s1, pos - s1));
            }
            c = Rational(num, den);
            have_c = true;
            skip();
            if (pos < src.size() && src[pos] == '*') {
                ++pos;
                skip();
            }
        }
        int k = 0;
        if (pos < src.size() && src[pos] == 't') {
            ++pos;
            k = 1;
            if (pos < src.size() && src[pos] == '^') {
                ++pos;
                size_t s0 = pos;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                    ++pos;
                if (s0 == pos) fail();
                k = std::stoi(src.substr(s0, pos - s0));
            }
        } else if (!have_c) {
            fail();
        }
        if (sign < 0) c = -c;
        std::vector<int> key = {k};
        auto it = m.find(key);
        if (it == m.end()) {
            m[key] = c;
        } else {
            it->second += c;
        }
        first = false;
    }
    if (m.empty()) m[{0}] = Rational(0);
    return std::make_shared<PolySmooth>(1, std::move(m), "f");
}

int cmd_verify(unsigned long seed, double tol_scale, bool skip_slow, const std::string& format) {
    scenarios::VerifyOptions opts;
    opts.seed = seed;
    opts.tol_scale = tol_scale;
    opts.include_slow = !skip_slow;
    auto reports = scenarios::verify_suite(opts);
    if (format == "csv") {
        std::cout << scenarios::to_csv(reports);
    } else {
        std::cout << scenarios::to_text(reports);
    }
    for (const auto& r : reports)
        if (!r.passed) return 1;
    return 0;
}

int cmd_reduce(const std::string& expr_text, std::string var_name) {
    DistExpr e = dsl::parse_expr(expr_text);
    if (var_name.empty()) {
        // first variable (in lexicographic order) carrying two poles in a term
        for (const auto& t : normalize(e).terms) {
            std::map<Var, int> counts;
            for (const auto& f : t.factors)
                if (f.is<VPPoleF>())
                    for (const auto& v : factor_vars(f)) ++counts[v];
            for (const auto& [v, n] : counts) {
                if (n >= 2 && (var_name.empty() || v.name < var_name)) var_name = v.name;
            }
        }
    }
    DistExpr r = var_name.empty() ? normalize(e) : reduce_in_var(e, Var(var_name));
    std::cout << dsl::print_expr(r) << "\n";
    return 0;
}

int cmd_integrate(const std::string& expr_text, const std::string& spec_text,
                  const std::vector<std::string>& params, double tol) {
    DistExpr e = dsl::parse_expr(expr_text);
    IntegrationSpec spec = IntegrationSpec::parse(spec_text);
    std::map<std::string, double> pmap;
    for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos)
            throw Error("parameter must be name=value: " + p);
        pmap[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
    }
    IntegrateOptions opts;
    opts.quad_tol = tol;
    auto v = repeated_integrate(e, spec, nullptr, pmap, opts);
    std::cout << num15(v.value) << "  (error estimate " << num15(v.error_estimate) << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vpcalc: distributional calculus for principal-value poles"};
    app.require_subcommand(1);

    double tol = 1e-8;
    double eps0 = 0.0;
    unsigned long seed = 20240817;
    std::string format = "text";
    app.add_option("--tol", tol, "oracle/engine tolerance");
    app.add_option("--eps0", eps0, "excision schedule start");
    app.add_option("--seed", seed, "seed for randomized suites");
    app.add_option("--format", format, "output format: text|csv")
        ->check(CLI::IsMember({"text", "csv"}));

    auto* verify = app.add_subcommand("verify", "run the full verification suite");
    double tol_scale = 1.0;
    bool skip_slow = false;
    verify->add_option("--tol-scale", tol_scale, "scale all tolerances (<1 tightens)");
    verify->add_flag("--skip-slow", skip_slow, "skip the long-running four-pole check");

    auto* reduce = app.add_subcommand("reduce", "reduce pole products and print normal form");
    std::string reduce_expr, reduce_var;
    reduce->add_option("expr", reduce_expr, "expression in the DSL")->required();
    reduce->add_option("--var", reduce_var, "variable whose pole products are reduced");

    auto* integrate = app.add_subcommand("integrate", "repeated integration of an expression");
    std::string int_expr, int_spec;
    std::vector<std::string> int_params;
    integrate->add_option("expr", int_expr, "expression in the DSL")->required();
    integrate->add_option("--spec", int_spec, "steps, e.g. \"x=0..1; z=0..2+w\"")->required();
    integrate->add_option("--param", int_params, "free parameter value, name=value");

    auto* quadc = app.add_subcommand("quad", "brute-force quadrature oracle");
    std::string quad_kind, quad_f = "1";
    double q_pole = 0.5, q_c = 0.0, q_a = 0.0, q_b = 1.0, q_z = 1.0;
    int q_n = 1;
    quadc->add_option("kind", quad_kind, "pv | log | dilog")->required();
    quadc->add_option("--f", quad_f, "test function, polynomial in t");
    quadc->add_option("--pole", q_pole, "pole location (pv)");
    quadc->add_option("--n", q_n, "pole degree (pv)");
    quadc->add_option("--c", q_c, "log singular point (log)");
    quadc->add_option("--a", q_a, "lower limit");
    quadc->add_option("--b", q_b, "upper limit");
    quadc->add_option("--z", q_z, "argument (dilog)");

    auto* scan = app.add_subcommand("iz_scan", "scan the simplex integral I(z)");
    double z_min = -0.9, z_max = 3.0;
    int steps = 40;
    std::string route = "both";
    scan->add_option("--min", z_min, "lowest z")->required();
    scan->add_option("--max", z_max, "highest z")->required();
    scan->add_option("--steps", steps, "number of rows")->required();
    scan->add_option("--route", route, "a | b | both")
        ->check(CLI::IsMember({"a", "b", "both"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(seed, tol_scale, skip_slow, format);
        if (reduce->parsed()) return cmd_reduce(reduce_expr, reduce_var);
        if (integrate->parsed()) return cmd_integrate(int_expr, int_spec, int_params, tol);
        if (quadc->parsed()) {
            using namespace vpcalc;
            if (quad_kind == "pv") {
                quad::PvOptions opts;
                if (eps0 > 0) opts.eps0 = eps0;
                auto q = quad::pv_quad(parse_poly1(quad_f), q_pole, q_n, q_a, q_b, opts);
                std::cout << num15(q.value) << "  (error estimate " << num15(q.error_estimate)
                          << ", " << q.evaluations << " evaluations)\n";
            } else if (quad_kind == "log") {
                auto q = quad::log_quad(parse_poly1(quad_f), q_c, q_a, q_b);
                std::cout << num15(q.value) << "  (error estimate " << num15(q.error_estimate)
                          << ", " << q.evaluations << " evaluations)\n";
            } else if (quad_kind == "dilog") {
                std::cout << num15(quad::dilog(q_z)) << "\n";
            } else {
                std::cerr << "unknown quadrature kind '" << quad_kind << "'\n";
                return 2;
            }
            return 0;
        }
        if (scan->parsed()) {
            if (steps < 1) throw vpcalc::Error("steps must be >= 1");
            std::cout << "z,I_route_A,I_route_B,oracle,abs_disagreement\n";
            for (int i = 0; i < steps; ++i) {
                const double z =
                    steps == 1 ? z_min : z_min + (z_max - z_min) * i / (steps - 1.0);
                if (std::abs(z) < 1e-12) {
                    std::cout << "# z=0 skipped: threshold undefined, one-sided limits differ "
                                 "by -pi^2\n";
                    continue;
                }
                std::string fa;
                double a = 0, b = 0, orc = 0;
                bool have_a = false;
                if ((route == "a" || route == "both") && z > 0) {
                    a = vpcalc::scenarios::simplex_route_a(z);
                    fa = num15(a);
                    have_a = true;
                }
                b = vpcalc::scenarios::simplex_route_b(z);
                orc = z > -1 ? vpcalc::scenarios::simplex_oracle(z, tol) : 0.0;
                double dis = std::abs(b - orc);
                if (have_a) dis = std::max({dis, std::abs(a - b), std::abs(a - orc)});
                std::cout << num15(z) << "," << fa << "," << num15(b) << "," << num15(orc) << ","
                          << num15(dis) << "\n";
            }
            return 0;
        }
    } catch (const vpcalc::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const vpcalc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
