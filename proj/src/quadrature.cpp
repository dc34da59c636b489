#include "vpcalc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "vpcalc/errors.hpp"

namespace vpcalc::quad {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kK15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kK15Weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kG7Weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const RealFn& f, double a, double b) {
    const double m = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 8; ++i) {
        double fv;
        if (i == 7) {
            fv = f(m);
            k += kK15Weights[i] * fv;
            g += kG7Weights[3] * fv;
        } else {
            const double x1 = m - r * kK15Nodes[i];
            const double x2 = m + r * kK15Nodes[i];
            fv = f(x1) + f(x2);
            k += kK15Weights[i] * fv;
            if (i % 2 == 1) g += kG7Weights[i / 2] * fv;
        }
    }
    k *= r;
    g *= r;
    return {k, std::abs(k - g)};
}

// Finite part of int_a^b (x-y)^p dx for p <= -1 with a < y < b; the
// epsilon-divergent excision terms are dropped (symmetric convention).
double fp_power_integral(int p, double y, double a, double b) {
    if (p == -1) return std::log(std::abs(b - y)) - std::log(std::abs(a - y));
    const double q = p + 1; // nonzero
    return (std::pow(b - y, q) - std::pow(a - y, q)) / q;
}

// Taylor coefficients f^(j)(y)/j! of an ascending-coefficient polynomial,
// by repeated synthetic division at y.
std::vector<double> taylor_coeffs(std::vector<double> t, double y) {
    const size_t d = t.size();
    std::vector<double> taylor(d, 0.0);
    for (size_t j = 0; j < d; ++j) {
        double rem = 0.0;
        for (size_t i = d - j; i-- > 0;) {
            const double save = t[i];
            t[i] = rem;
            rem = save + rem * y;
        }
        taylor[j] = rem;
        // The quotient now occupies t[0 .. d-j-2].
    }
    return taylor;
}

// Exact principal-value / finite-part integral of a 1-D polynomial against
// (x-y)^-n over [a, b].
double pv_poly(const std::vector<double>& coeffs, double y, int n, double a, double b) {
    std::vector<double> taylor = taylor_coeffs(coeffs, y);
    double result = 0.0;
    for (size_t j = 0; j < taylor.size(); ++j) {
        if (taylor[j] == 0.0) continue;
        const int p = static_cast<int>(j) - n;
        if (p <= -1) {
            result += taylor[j] * fp_power_integral(p, y, a, b);
        } else {
            result += taylor[j] * (std::pow(b - y, p + 1) - std::pow(a - y, p + 1)) / (p + 1);
        }
    }
    return result;
}

std::vector<double> poly_coeffs_1d(const PolySmooth& p) {
    std::vector<double> c;
    for (const auto& [key, r] : p.monomials()) {
        const int e = key[0];
        if (static_cast<int>(c.size()) <= e) c.resize(e + 1, 0.0);
        c[e] += r.to_double();
    }
    if (c.empty()) c.push_back(0.0);
    return c;
}

// 1-D polynomial coefficients when f is polynomial or constant; empty otherwise.
std::vector<double> as_poly_1d(const SmoothFn& f) {
    if (auto* p = dynamic_cast<const PolySmooth*>(&f)) return poly_coeffs_1d(*p);
    double c;
    if (f.is_constant(&c)) return {c};
    return {};
}

} // namespace

QuadResult gk_adaptive(const RealFn& f, double a, double b, double abs_tol, double rel_tol,
                       int max_intervals) {
    long evals = 0;
    RealFn fc = [&](double x) {
        ++evals;
        return f(x);
    };
    if (a == b) return {0.0, 0.0, 0};

    struct Interval {
        double a, b, value, error;
        bool operator<(const Interval& o) const { return error < o.error; }
    };
    std::priority_queue<Interval> heap;
    auto first = gk15(fc, a, b);
    heap.push({a, b, first.value, first.error});
    double total = first.value, total_err = first.error;

    int n = 1;
    while (n < max_intervals) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= tol) break;
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst); // interval at rounding resolution
            break;
        }
        auto left = gk15(fc, worst.a, mid);
        auto right = gk15(fc, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
        ++n;
    }
    return {total, total_err, evals};
}

QuadResult tanh_sinh(const RealFn& f, double a, double b, double target, int max_level) {
    if (a == b) return {0.0, 0.0, 0};
    if (b < a) {
        QuadResult r = tanh_sinh(f, b, a, target, max_level);
        r.value = -r.value;
        return r;
    }
    const double r = 0.5 * (b - a);
    long evals = 0;

    // weight(t) = (pi/2) cosh t / cosh^2((pi/2) sinh t); the abscissa is placed
    // by its distance from the nearer endpoint to keep precision there.
    auto eval_at = [&](double t, double& contrib) {
        contrib = 0.0;
        const double u = 1.5707963267948966 * std::sinh(t);
        const double au = std::abs(u);
        if (au > 350.0) return false;
        const double e2 = std::exp(-2.0 * au);
        const double dist = 2.0 * r * e2 / (1.0 + e2);
        if (dist <= 0.0) return false;
        const double w =
            1.5707963267948966 * std::cosh(t) * (4.0 * e2 / ((1.0 + e2) * (1.0 + e2)));
        double x;
        if (t >= 0) {
            x = b - dist;
            if (x >= b) x = std::nextafter(b, a);
        } else {
            x = a + dist;
            if (x <= a) x = std::nextafter(a, b);
        }
        ++evals;
        const double v = w * r * f(x);
        if (!std::isfinite(v)) return false;
        contrib = v;
        return true;
    };

    const double t_cut = 6.56;
    double h = 1.0;
    double sum = 0.0;
    {
        double c;
        eval_at(0.0, c);
        sum += c;
        for (int k = 1; k * h <= t_cut; ++k) {
            double c1 = 0, c2 = 0;
            bool ok1 = eval_at(k * h, c1);
            bool ok2 = eval_at(-k * h, c2);
            sum += c1 + c2;
            if (!ok1 && !ok2 && k > 4) break;
        }
    }
    double prev = sum * h;
    double prev_diff = std::max(std::abs(prev), 1e-300);
    double value = prev, err = prev_diff;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (int k = 1; k * h <= t_cut; k += 2) {
            double c1 = 0, c2 = 0;
            eval_at(k * h, c1);
            eval_at(-k * h, c2);
            add += c1 + c2;
        }
        value = 0.5 * prev + h * add;
        const double diff = std::abs(value - prev);
        if (diff <= target * (1.0 + std::abs(value)) && level >= 3) {
            err = (prev_diff > diff && prev_diff > 0) ? diff * diff / prev_diff : diff;
            err = std::max(err, 1e-16 * std::abs(value));
            return {value, err, evals};
        }
        prev = value;
        prev_diff = std::max(diff, 1e-300);
        err = diff;
    }
    return {value, err, evals};
}

QuadResult pv_quad(const RealFn& f, double pole, int n, double a, double b,
                   const PvOptions& opts) {
    auto fn = std::make_shared<OpaqueFn>(1, [f](std::span<const double> x) { return f(x[0]); });
    return pv_quad(std::static_pointer_cast<const SmoothFn>(fn), pole, n, a, b, opts);
}

QuadResult pv_quad(const SmoothPtr& f, double pole, int n, double a, double b,
                   const PvOptions& opts) {
    if (n < 1) throw DomainError("pv_quad: pole degree must be >= 1");
    if (!(a < pole && pole < b))
        throw PoleOutsideInterval("pv_quad: pole must lie strictly inside (a, b)");
    if (f->arity() != 1) throw DomainError("pv_quad: test function must have one argument");

    const std::vector<double> poly = as_poly_1d(*f);

    long evals = 0;
    RealFn fv = [&](double x) {
        ++evals;
        const double xx = x;
        return f->eval(std::span<const double>(&xx, 1));
    };

    double quad_err = 0.0;

    if (n == 1) {
        // Symmetric excision with Richardson extrapolation over the
        // epsilon schedule; the polynomial shortcut is reserved for use as an
        // inner building block so the excision path stays an honest oracle.
        const double d = std::min(pole - a, b - pole);
        double eps0 = opts.eps0 > 0 ? opts.eps0 : (b - a) / 8.0;
        eps0 = std::min(eps0, 0.5 * d);

        const int K = std::max(4, opts.schedule_terms);
        std::vector<double> eps(K);
        for (int k = 0; k < K; ++k) eps[k] = eps0 * std::pow(2.0, -k);

        RealFn integrand = [&](double x) { return fv(x) / (x - pole); };

        auto left = tanh_sinh(integrand, a, pole - eps0, opts.panel_tol);
        auto right = tanh_sinh(integrand, pole + eps0, b, opts.panel_tol);
        quad_err += left.error_estimate + right.error_estimate;

        std::vector<double> I(K);
        I[0] = left.value + right.value;
        for (int k = 1; k < K; ++k) {
            auto rl = gk_adaptive(integrand, pole - eps[k - 1], pole - eps[k], opts.panel_tol);
            auto rr = gk_adaptive(integrand, pole + eps[k], pole + eps[k - 1], opts.panel_tol);
            quad_err += rl.error_estimate + rr.error_estimate;
            I[k] = I[k - 1] + rl.value + rr.value;
        }

        // Excision error is c1 e + c3 e^3 + c5 e^5 + ...; eliminate three terms.
        std::vector<double> cur = I;
        double residual = std::abs(cur[K - 1] - cur[K - 2]);
        double value = cur[K - 1];
        for (int p : {1, 3, 5}) {
            const double w = std::pow(2.0, p);
            std::vector<double> nxt(cur.size() - 1);
            for (size_t k = 0; k + 1 < cur.size(); ++k)
                nxt[k] = (w * cur[k + 1] - cur[k]) / (w - 1.0);
            cur = std::move(nxt);
            value = cur.back();
            if (cur.size() >= 2) residual = std::abs(cur[cur.size() - 1] - cur[cur.size() - 2]);
        }
        const double scale = 1.0 + std::abs(value);
        if (residual > std::max(opts.target * scale * 100.0, 1e-7 * scale))
            throw NonConvergent("pv_quad: excision extrapolation did not converge");
        return {value, std::max(residual, quad_err) + 1e-15 * scale, evals};
    }

    // n >= 2: Taylor subtraction plus closed-form finite parts.
    if (!poly.empty()) {
        const double v = pv_poly(poly, pole, n, a, b);
        return {v, 5e-15 * (1.0 + std::abs(v)), 0};
    }

    std::vector<double> tay(n + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        if (j > f->max_derivative_order()) {
            if (j == n) break; // order n only feeds the near-pole series
            throw MissingDerivatives("pv_quad: derivatives up to order n-1 required");
        }
        SmoothPtr dj = derivative_of(f, 0, j);
        const double yy = pole;
        tay[j] = dj->eval(std::span<const double>(&yy, 1)) / Rational::factorial(j).to_double();
    }

    auto taylor_head = [&](double x) {
        double s = 0.0, p = 1.0;
        for (int j = 0; j < n; ++j) {
            s += tay[j] * p;
            p *= (x - pole);
        }
        return s;
    };
    const double near = std::min({0.5 * (pole - a), 0.5 * (b - pole), (b - a) / 16.0});
    RealFn subtracted = [&](double x) {
        const double dx = x - pole;
        if (std::abs(dx) < 1e-5 * (1.0 + std::abs(pole))) return tay[n];
        return (fv(x) - taylor_head(x)) / std::pow(dx, n);
    };

    auto l = tanh_sinh(subtracted, a, pole - near, opts.panel_tol);
    auto mid = gk_adaptive(subtracted, pole - near, pole + near, opts.panel_tol);
    auto r = tanh_sinh(subtracted, pole + near, b, opts.panel_tol);
    double value = l.value + mid.value + r.value;
    quad_err += l.error_estimate + mid.error_estimate + r.error_estimate;

    for (int j = 0; j < n; ++j) {
        if (tay[j] != 0.0) value += tay[j] * fp_power_integral(j - n, pole, a, b);
    }
    return {value, quad_err + 1e-14 * (1.0 + std::abs(value)), evals};
}

QuadResult log_quad(const RealFn& f, double c, double a, double b, double target) {
    long evals = 0;
    RealFn fv = [&](double x) {
        ++evals;
        return f(x);
    };
    if (a == b) return {0.0, 0.0, 0};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    QuadResult total{0.0, 0.0, 0};
    auto accumulate = [&](QuadResult q) {
        total.value += q.value;
        total.error_estimate += q.error_estimate;
    };

    if (c > a && c < b) {
        // int_0^L ln(s) f(c +- s) ds on each side; singular left endpoint.
        auto piece = [&](double L, int dir) {
            RealFn g = [&, dir](double s) { return std::log(s) * fv(c + dir * s); };
            return tanh_sinh(g, 0.0, L, target);
        };
        accumulate(piece(c - a, -1));
        accumulate(piece(b - c, +1));
    } else {
        RealFn g = [&](double x) { return std::log(std::abs(x - c)) * fv(x); };
        accumulate(tanh_sinh(g, a, b, target));
    }
    const double scale = 1.0 + std::abs(total.value);
    if (total.error_estimate > std::max(1e3 * target * scale, 1e-6 * scale))
        throw NonConvergent("log_quad did not reach its accuracy target");
    total.value *= sign;
    total.evaluations = evals;
    return total;
}

QuadResult log_quad(const SmoothPtr& f, double c, double a, double b, double target) {
    return log_quad(
        [&](double x) {
            const double xx = x;
            return f->eval(std::span<const double>(&xx, 1));
        },
        c, a, b, target);
}

QuadResult multiple_integral_regular(const std::vector<int>& degrees, const SmoothPtr& u,
                                     double lo, double hi, double tol) {
    const int m = static_cast<int>(degrees.size());
    if (m < 1) throw DomainError("multiple_integral_regular: need at least one pole");
    for (int n : degrees)
        if (n < 1) throw DomainError("multiple_integral_regular: degrees must be >= 1");
    if (u && u->arity() != m + 1)
        throw DomainError("multiple_integral_regular: test function arity must be m+1");

    long evals = 0;
    double inner_err = 0.0;
    PvOptions inner_opts;
    inner_opts.panel_tol = std::min(1e-11, tol * 1e-3);

    double cval = 1.0;
    const bool const_u = !u || u->is_constant(&cval);
    auto* poly_u = u ? dynamic_cast<const PolySmooth*>(u.get()) : nullptr;

    // G(x): the inner z-integrations in the regular order.
    RealFn G = [&](double x) -> double {
        if (const_u) {
            // Poles decouple: each inner integral is the exact finite-part
            // value of the constant test function.
            double prod = cval;
            for (int i = 0; i < m; ++i) {
                const double s = degrees[i] % 2 == 0 ? 1.0 : -1.0;
                prod *= s * pv_poly({1.0}, x, degrees[i], lo, hi);
                evals += 1;
            }
            return prod;
        }
        std::vector<double> point(m + 1, 0.0);
        point[0] = x;
        std::function<double(int)> level = [&](int i) -> double {
            const double s = degrees[i - 1] % 2 == 0 ? 1.0 : -1.0;
            if (i == m && poly_u) {
                // Slice u to a 1-D polynomial in z_m; its finite-part integral
                // against the pole is exact.
                std::vector<double> c;
                for (const auto& [key, r] : poly_u->monomials()) {
                    double factor = r.to_double();
                    for (int j = 0; j <= m; ++j) {
                        if (j == i) continue;
                        for (int e = 0; e < key[j]; ++e) factor *= point[j];
                    }
                    const int e = key[i];
                    if (static_cast<int>(c.size()) <= e) c.resize(e + 1, 0.0);
                    c[e] += factor;
                }
                if (c.empty()) c.push_back(0.0);
                evals += 1;
                return s * pv_poly(c, x, degrees[i - 1], lo, hi);
            }
            RealFn fz = [&](double z) -> double {
                point[i] = z;
                if (i == m) {
                    ++evals;
                    return u->eval(point);
                }
                return level(i + 1);
            };
            auto q = pv_quad(fz, x, degrees[i - 1], lo, hi, inner_opts);
            inner_err = std::max(inner_err, q.error_estimate);
            return s * q.value;
        };
        return level(1);
    };

    auto outer = tanh_sinh(G, lo, hi, tol * 0.1);
    return {outer.value, outer.error_estimate + (hi - lo) * inner_err, evals + outer.evaluations};
}

} // namespace vpcalc::quad
