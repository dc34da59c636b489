#pragma once

#include "vpcalc/expr.hpp"

namespace vpcalc::detail {

// Unnormalized reduction of VP 1/(x-c1)^n1 * VP 1/(x-c2)^n2 into single poles
// of x plus a delta chain. Requires c1 != c2 structurally.
DistExpr reduce_pair_raw(const Var& x, const Affine& c1, int n1, const Affine& c2, int n2);

// Like-term merge with canonical factor and term ordering; assumes factor
// arguments are already in canonical form.
DistExpr merge_terms(std::vector<DistTerm> terms);

int compare_factor_lists(const std::vector<Factor>& a, const std::vector<Factor>& b);

} // namespace vpcalc::detail
