#pragma once

#include <map>
#include <optional>
#include <string>

#include "vpcalc/expr.hpp"

namespace vpcalc {

struct IntegrationStep {
    Var var;
    Affine lower;
    Affine upper;
    bool lower_infinite = false; // mapped to the test function's support bound
    bool upper_infinite = false;
};

/// Ordered integration steps; the first step is integrated first. Each step's
/// limits may depend only on variables of later steps.
struct IntegrationSpec {
    std::vector<IntegrationStep> steps;

    /// "x=0..1; z1=0..1; z2=0..2+z" (separators ';', limits affine, 'inf' and
    /// '-inf' map to the test function's support bounds).
    static IntegrationSpec parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
};

struct IntegrateOptions {
    double quad_tol = 1e-9;      // per-level target of the engine quadrature
    double singular_tol = 1e-12; // pointwise singular-hit tolerance
};

struct IntegralValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Integrate one variable of a single term over [a, b]. The term must carry
/// at most one VP pole in `var` (reduce first otherwise), no delta in `var`,
/// and only smooth weights in `var`; the result is the general finite-limit
/// formula: a log-kernel residual integral, endpoint log terms, and endpoint
/// VP poles in the remaining variables.
DistExpr integrate_vp_term(const DistTerm& t, const Var& var, const Affine& a, const Affine& b);

/// Variant for weights whose dependence on the pole-center variables
/// separates out: the step becomes a residual finite-part integral factor
/// whose kernel degree carries the distribution-sense derivatives.
/// Throws NotSeparable when the weight or the limits involve the center.
DistExpr integrate_separable(const DistTerm& t, const Var& var, const Affine& a, const Affine& b);

/// Integrate a delta factor: (-1)^k times the k-th derivative of the rest
/// evaluated at the delta's point, guarded by theta(b-c) theta(c-a).
DistExpr integrate_delta(const DistTerm& t, const Var& var, const Affine& a, const Affine& b);

/// One full symbolic step over `var`; terms that resist a symbolic route are
/// returned separately for nested numeric integration.
struct StepResult {
    DistExpr symbolic;
    std::vector<DistTerm> numeric; // terms to integrate numerically from this step on
};
StepResult integrate_step(const DistExpr& e, const Var& var, const Affine& a, const Affine& b,
                          int step_index = -1);

/// Repeated integration of e over the given spec (innermost step first),
/// with an optional test-function weight u(vars...) in the order of the spec
/// steps, and numeric values for any remaining free parameters.
IntegralValue repeated_integrate(const DistExpr& e, const IntegrationSpec& spec,
                                 const SmoothPtr& u = nullptr,
                                 const std::map<std::string, double>& params = {},
                                 const IntegrateOptions& opts = {});

/// Nested numeric integration of terms over the trailing steps [from..end).
/// Deltas are collapsed symbolically; poles and logs get singularity-aware
/// one-dimensional quadrature level by level. Used as the engine's fallback
/// and exposed for tests.
IntegralValue numeric_nested(const std::vector<DistTerm>& terms, const IntegrationSpec& spec,
                             size_t from, const std::map<std::string, double>& params,
                             const IntegrateOptions& opts = {});

} // namespace vpcalc
