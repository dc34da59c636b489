#pragma once

#include "vpcalc/expr.hpp"

namespace vpcalc {

/// VP 1/(x-z1) * VP 1/(x-z2) rewritten for the irregular integration order:
///   VP 1/(z1-z2) [VP 1/(x-z1) - VP 1/(x-z2)] + pi^2 delta(x-z1) delta(x-z2),
/// normalized (the delta chain becomes delta(z1-z2) delta(x-z2)). The free
/// constants of the extension are fixed by order independence: the
/// cross-term coefficient is zero and the delta-chain coefficient is pi^2.
/// Throws IdenticalCenters when z1 and z2 are structurally equal.
DistExpr reduce_pair_simple(const Var& x, const Affine& z1, const Affine& z2);

/// Arbitrary-degree pair reduction, generated from the simple one by
/// parameter differentiation: binomial-weighted sums of single poles plus
///   pi^2 (-1)^(n1+n2) / ((n1-1)!(n2-1)!) delta^(n1-1)(x-z1) delta^(n2-1)(x-z2).
/// The sign factor comes from d/dz delta(x-z) = -delta'(x-z); it is absent
/// when n1+n2 is even and is verified against the numeric oracle.
DistExpr reduce_pair_general(const Var& x, const Affine& z1, int n1, const Affine& z2, int n2);

/// Product of any number of poles in x, reduced recursively: multiply the
/// reduced (m-1)-pole result by the next pole and re-reduce every arising
/// pair of x-poles. Centers must be pairwise structurally distinct.
DistExpr reduce_product(const Var& x, const std::vector<std::pair<Affine, int>>& poles);

/// Rewrite every term of e so it carries at most one VP pole in x,
/// reducing pole pairs in x repeatedly and normalizing.
DistExpr reduce_in_var(const DistExpr& e, const Var& x);

} // namespace vpcalc
