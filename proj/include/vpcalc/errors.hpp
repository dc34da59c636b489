#pragma once

#include <stdexcept>
#include <string>

namespace vpcalc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pointwise evaluation hit a pole or log argument within tolerance of zero.
struct SingularEvaluation : Error {
    using Error::Error;
};

// A delta factor cannot be evaluated pointwise.
struct DeltaNotEvaluable : Error {
    using Error::Error;
};

// Reduction of a product of poles with structurally identical centers.
struct IdenticalCenters : Error {
    using Error::Error;
};

// A product the calculus leaves undefined, e.g. VP 1/(x-z) * delta(x-z).
struct UndefinedProduct : Error {
    using Error::Error;
};

struct PoleAtEndpoint : Error {
    explicit PoleAtEndpoint(const std::string& what, int step = -1)
        : Error(what), step_index(step) {}
    int step_index;
};

struct DeltaAtEndpoint : Error {
    explicit DeltaAtEndpoint(const std::string& what, int step = -1)
        : Error(what), step_index(step) {}
    int step_index;
};

struct NotSeparable : Error {
    using Error::Error;
};

struct MissingDerivatives : Error {
    using Error::Error;
};

struct NonConvergent : Error {
    using Error::Error;
};

struct PoleOutsideInterval : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

// The z = 0 threshold of the simplex integral; one-sided limits are offered instead.
struct ThresholdUndefined : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, int line_, int column_, std::string expected_)
        : Error(what), line(line_), column(column_), expected(std::move(expected_)) {}
    int line;
    int column;
    std::string expected;
};

} // namespace vpcalc
