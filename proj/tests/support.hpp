#pragma once

#include <doctest.h>

#include <random>
#include <string>

#include "vpcalc/dsl.hpp"
#include "vpcalc/expr.hpp"

namespace tsup {

inline vpcalc::DistExpr P(const std::string& src) { return vpcalc::dsl::parse_expr(src); }

inline vpcalc::DistExpr N(const std::string& src) {
    return vpcalc::normalize(vpcalc::dsl::parse_expr(src));
}

// Structural equality with readable output on failure.
inline void check_expr_equal(const vpcalc::DistExpr& got, const vpcalc::DistExpr& want) {
    const bool equal = vpcalc::expr_equal(got, want);
    if (!equal) {
        INFO("got:  " << vpcalc::dsl::print_expr(got));
        INFO("want: " << vpcalc::dsl::print_expr(want));
    }
    CHECK(equal);
}

inline vpcalc::Affine A(const std::string& src) { return vpcalc::dsl::parse_affine(src); }

} // namespace tsup
