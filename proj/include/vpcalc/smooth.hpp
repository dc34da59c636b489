#pragma once

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vpcalc/rational.hpp"

namespace vpcalc {

class SmoothFn;
using SmoothPtr = std::shared_ptr<const SmoothFn>;

/// A smooth test-function handle: evaluable on real vectors, with partial
/// derivatives up to the order a pole integration needs and finite support
/// bounds per argument. Implementations must be safe to call concurrently.
class SmoothFn {
  public:
    virtual ~SmoothFn() = default;

    virtual int arity() const = 0;
    virtual double eval(std::span<const double> args) const = 0;

    /// Exact partial derivative when available; the default wraps the
    /// function in a central finite-difference stencil.
    virtual SmoothPtr derivative(int arg_index) const;

    virtual int max_derivative_order() const { return 8; }
    virtual std::pair<double, double> support(int arg_index) const;

    virtual bool is_constant(double* value = nullptr) const;
    virtual bool is_zero() const;
    virtual bool equals(const SmoothFn& other) const { return this == &other; }

    virtual std::string name() const { return "f"; }
};

/// Constant function of any arity.
class ConstFn final : public SmoothFn {
  public:
    explicit ConstFn(Rational value, int arity = 1)
        : value_(std::move(value)), arity_(arity) {}

    int arity() const override { return arity_; }
    double eval(std::span<const double>) const override { return value_.to_double(); }
    SmoothPtr derivative(int) const override;
    int max_derivative_order() const override { return 1 << 20; }
    bool is_constant(double* value) const override {
        if (value) *value = value_.to_double();
        return true;
    }
    bool is_zero() const override { return value_.is_zero(); }
    bool equals(const SmoothFn& other) const override;
    std::string name() const override { return value_.to_string(); }

    const Rational& value() const { return value_; }

  private:
    Rational value_;
    int arity_;
};

/// Multivariate polynomial with exact rational coefficients.
/// Keys are exponent vectors of length arity().
class PolySmooth final : public SmoothFn {
  public:
    using Monomials = std::map<std::vector<int>, Rational>;

    PolySmooth(int arity, Monomials monomials, std::string name = "p");

    static std::shared_ptr<const PolySmooth> constant(int arity, Rational c);
    /// x_i as a polynomial of the given arity.
    static std::shared_ptr<const PolySmooth> coordinate(int arity, int index);

    int arity() const override { return arity_; }
    double eval(std::span<const double> args) const override;
    SmoothPtr derivative(int arg_index) const override;
    int max_derivative_order() const override { return 1 << 20; }
    bool is_constant(double* value) const override;
    bool is_zero() const override { return monomials_.empty(); }
    bool equals(const SmoothFn& other) const override;
    std::string name() const override { return name_; }

    const Monomials& monomials() const { return monomials_; }
    int degree() const;

    std::shared_ptr<const PolySmooth> exact_derivative(int arg_index) const;

    friend std::shared_ptr<const PolySmooth> operator*(const PolySmooth& a, const PolySmooth& b);
    friend std::shared_ptr<const PolySmooth> operator+(const PolySmooth& a, const PolySmooth& b);

  private:
    int arity_;
    Monomials monomials_;
    std::string name_;
    mutable std::map<int, std::shared_ptr<const PolySmooth>> deriv_cache_;
    mutable std::mutex cache_mutex_;
};

/// Opaque callable with finite-difference derivatives.
class OpaqueFn final : public SmoothFn {
  public:
    OpaqueFn(int arity, std::function<double(std::span<const double>)> fn,
             std::string name = "f", int max_order = 6);

    int arity() const override { return arity_; }
    double eval(std::span<const double> args) const override { return fn_(args); }
    int max_derivative_order() const override { return max_order_; }
    std::string name() const override { return name_; }

  private:
    int arity_;
    std::function<double(std::span<const double>)> fn_;
    std::string name_;
    int max_order_;
};

/// Derivative of `base` of the given order in the given argument, evaluated by
/// Richardson-refined central differences with step h = eps^(1/(order+2)) * scale.
class FdDerivFn final : public SmoothFn {
  public:
    FdDerivFn(SmoothPtr base, int arg_index, int order = 1);

    int arity() const override { return base_->arity(); }
    double eval(std::span<const double> args) const override;
    SmoothPtr derivative(int arg_index) const override;
    int max_derivative_order() const override;
    std::pair<double, double> support(int arg_index) const override {
        return base_->support(arg_index);
    }
    std::string name() const override;

  private:
    SmoothPtr base_;
    int arg_index_;
    int order_;
};

/// Take an order-k partial derivative, preferring exact derivatives.
SmoothPtr derivative_of(const SmoothPtr& fn, int arg_index, int order = 1);

/// Random polynomial test function on [0,1]^arity. The random part has total
/// degree <= degree; the result is multiplied by prod_i (x_i(1-x_i))^taper so
/// it vanishes to order `taper` at the support boundary.
std::shared_ptr<const PolySmooth> random_test_poly(std::mt19937_64& rng, int arity, int degree,
                                                   int taper = 2);

} // namespace vpcalc
