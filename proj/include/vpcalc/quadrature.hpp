#pragma once

#include <functional>

#include "vpcalc/smooth.hpp"

namespace vpcalc::quad {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

struct PvOptions {
    double eps0 = 0.0;          // 0: default (b-a)/8, clamped to the pole-interval distance
    int schedule_terms = 8;     // eps_k = eps0 * 2^-k
    double target = 1e-9;       // Cauchy criterion for the extrapolated sequence
    double panel_tol = 1e-12;   // tolerance of the conventional sub-integrals
};

using RealFn = std::function<double(double)>;

/// Principal-value / finite-part integral of f(x)/(x-pole)^n over [a, b],
/// with a < pole < b. Brute force: symmetric excision with Richardson
/// extrapolation for n = 1, Taylor subtraction plus closed-form finite parts
/// for n >= 2. Independent of the symbolic integration engine.
QuadResult pv_quad(const SmoothPtr& f, double pole, int n, double a, double b,
                   const PvOptions& opts = {});
QuadResult pv_quad(const RealFn& f, double pole, int n, double a, double b,
                   const PvOptions& opts = {});

/// Conventional integral of ln|x-c| * f(x) over [a, b]; c may lie inside or
/// outside the interval. Interval splitting at c with double-exponential
/// quadrature graded into the singular point.
QuadResult log_quad(const SmoothPtr& f, double c, double a, double b, double target = 1e-10);
QuadResult log_quad(const RealFn& f, double c, double a, double b, double target = 1e-10);

/// dilog(z) = integral from 1 to z of ln(t)/(1-t) dt, for z > 0.
/// Equal to Li2(1-z) in the standard convention; absolute accuracy ~1e-14.
double dilog(double z);

/// Regular-order repeated integral over [lo,hi]^(m+1):
///   int dx prod_i VP 1/(x - z_i)^(n_i) u(x, z_1..z_m)
/// with the z integrations done first (each hits its pole once, brute-force
/// PV quadrature) and the x integration last (log-aware refinement).
QuadResult multiple_integral_regular(const std::vector<int>& degrees, const SmoothPtr& u,
                                     double lo = 0.0, double hi = 1.0, double tol = 1e-8);

// Building blocks, exposed for tests and scenario code.

/// Adaptive Gauss-Kronrod 7/15.
QuadResult gk_adaptive(const RealFn& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                       int max_intervals = 4000);

/// Double-exponential (tanh-sinh) quadrature; tolerates integrable endpoint
/// singularities.
QuadResult tanh_sinh(const RealFn& f, double a, double b, double target = 1e-12,
                     int max_level = 12);

} // namespace vpcalc::quad
