#pragma once

#include <functional>

namespace vpcalc::engine {

using Fn1 = std::function<double(double)>;

struct Out {
    double value = 0.0;
    double err = 0.0;
};

/// Fixed 16-point Gauss-Legendre rule.
double gl16(const Fn1& f, double a, double b);

/// Adaptive bisection with GL16 panels (error from panel-vs-halves comparison).
Out refine(const Fn1& f, double a, double b, double tol, int max_depth = 24);

/// Composite rule with geometric panel grading into endpoints that carry
/// integrable singularities (logs, fractional kinks).
Out graded(const Fn1& f, double a, double b, bool grade_a, bool grade_b, double tol);

/// Principal-value core around a simple pole at p with half-width d:
/// int_0^d [rest(p+s) - rest(p-s)] / s ds.
Out pv_paired(const Fn1& rest, double p, double d, double tol);

} // namespace vpcalc::engine
