#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vpcalc/affine.hpp"
#include "vpcalc/pi_coeff.hpp"
#include "vpcalc/smooth.hpp"

namespace vpcalc {

struct Factor;

/// delta^(order)(arg). Canonical form: the leading variable of arg carries
/// coefficient +1; rescalings are folded into the term coefficient by
/// delta^(k)(s t) = s^-k |s|^-1 delta^(k)(t).
struct DeltaF {
    int order = 0;
    Affine arg;
};

/// VP 1/arg^degree. Canonical form: leading coefficient +1, scalings folded
/// into the term coefficient.
struct VPPoleF {
    Affine arg;
    int degree = 1;
};

/// ln|arg|. Only the sign of arg is normalized (|.| makes it exact).
struct LogAbsF {
    Affine arg;
};

/// theta(arg), the Heaviside step. Positive rescalings are exact.
struct HeavisideF {
    Affine arg;
};

/// A smooth weight applied to affine combinations of the free variables.
struct SmoothF {
    SmoothPtr fn;
    std::vector<Affine> args;
};

/// A residual one-dimensional integral left from a symbolic integration step:
///
///   kernel_degree == 0:   int_lower^upper ln|t - center| w(t) dt
///   kernel_degree == m:   FP int_lower^upper w(t) / (t - center)^m dt
///
/// where t is the bound variable and w is the product of the weight factors.
/// Derivatives along the center lift the kernel degree exactly, so these
/// factors stay closed under the differentiation the calculus needs.
struct LogIntegralF {
    Var bound;
    int kernel_degree = 0;
    Affine center;
    Affine lower;
    Affine upper;
    std::vector<Factor> weight;
};

struct Factor {
    std::variant<DeltaF, VPPoleF, LogAbsF, HeavisideF, SmoothF, LogIntegralF> node;

    int kind_rank() const { return static_cast<int>(node.index()); }
    template <class T> bool is() const { return std::holds_alternative<T>(node); }
    template <class T> const T& as() const { return std::get<T>(node); }
    template <class T> T& as() { return std::get<T>(node); }
};

Factor make_delta(int order, Affine arg);
Factor make_vp(Affine arg, int degree = 1);
Factor make_log(Affine arg);
Factor make_theta(Affine arg);
Factor make_smooth(SmoothPtr fn, std::vector<Affine> args);

bool factor_equal(const Factor& a, const Factor& b);
/// Deterministic ordering for canonical factor lists (deltas, then poles,
/// then logs, then thetas, then smooth weights, then residual integrals).
bool factor_less(const Factor& a, const Factor& b);
std::set<Var> factor_vars(const Factor& f);
bool factor_depends_on(const Factor& f, const Var& v);

struct DistTerm {
    PiCoeff coeff;
    std::vector<Factor> factors;
};

bool term_equal(const DistTerm& a, const DistTerm& b);

struct DistExpr;
/// Structural equality of term lists (use on normalized expressions).
bool expr_equal(const DistExpr& a, const DistExpr& b);

struct DistExpr {
    std::vector<DistTerm> terms;

    static DistExpr zero() { return {}; }
    static DistExpr constant(PiCoeff c);
    static DistExpr single(DistTerm t);
    static DistExpr single(PiCoeff coeff, std::vector<Factor> factors);

    bool is_zero() const { return terms.empty(); }
    std::set<Var> free_vars() const;

    DistExpr operator-() const;
    friend DistExpr operator+(const DistExpr& a, const DistExpr& b);
    friend DistExpr operator-(const DistExpr& a, const DistExpr& b);

    DistExpr scaled(const PiCoeff& c) const;
};

/// Structural product without reduction: every pair of terms is concatenated
/// and the result normalized. Products of VP poles in a shared variable are
/// left in place (flagged for reduction) unless the shared variable is the
/// lexicographically greatest of a two-pole difference cluster, which the
/// canonical form rewrites.
DistExpr mul_expr(const DistExpr& a, const DistExpr& b);

/// Canonical normal form. Idempotent. Performs, to a fixed point:
///  - per-factor argument normalization with exact coefficient folding,
///  - delta-chain triangularization (each variable leads at most one delta),
///  - substitution of order-0 delta constraints into the other factors,
///  - merging of identical-argument poles (degrees add) and theta duplicates,
///  - canonical rewriting of reducible same-variable pole pairs,
///  - like-term merging with zero-coefficient removal.
DistExpr normalize(const DistExpr& e);

/// Pointwise value at a nonsingular assignment. Throws SingularEvaluation if
/// a pole or log argument is within `tol` of zero, DeltaNotEvaluable if a
/// delta factor remains, ThresholdUndefined for a theta argument within tol.
double evaluate_pointwise(const DistExpr& e, const std::map<std::string, double>& assignment,
                          double tol = 1e-12);
double evaluate_term_pointwise(const DistTerm& t, const std::map<std::string, double>& assignment,
                               double tol = 1e-12);

/// d/dv in the distribution sense (product rule over factors; poles and logs
/// differentiate into higher poles, thetas into deltas, residual integrals
/// lift their kernels).
DistExpr differentiate(const DistTerm& t, const Var& v);
DistExpr differentiate(const DistExpr& e, const Var& v);

/// Replace every free occurrence of v by the affine expression a.
DistTerm substitute(const DistTerm& t, const Var& v, const Affine& a);
DistExpr substitute(const DistExpr& e, const Var& v, const Affine& a);

/// Numeric value of a residual-integral factor under a full assignment of its
/// free variables. Implemented by the engine-side quadrature.
double eval_log_integral(const LogIntegralF& li, const std::map<std::string, double>& assignment,
                         double tol);

} // namespace vpcalc
