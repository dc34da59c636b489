#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "vpcalc/reduction.hpp"

using namespace vpcalc;
using tsup::A;
using tsup::N;
using tsup::P;

namespace {
const Var X("x");
}

TEST_CASE("simple pair reduction matches the reduction formula") {
    DistExpr red = reduce_pair_simple(X, A("z1"), A("z2"));
    DistExpr want = N("VP[1/(z1-z2)]*VP[1/(x-z1)] - VP[1/(z1-z2)]*VP[1/(x-z2)] "
                      "+ pi^2 * delta(z1-z2)*delta(x-z2)");
    tsup::check_expr_equal(red, want);
}

TEST_CASE("pair reduction is symmetric in the centers") {
    tsup::check_expr_equal(reduce_pair_simple(X, A("z2"), A("z1")),
                           reduce_pair_simple(X, A("z1"), A("z2")));
    CHECK_THROWS_AS(reduce_pair_simple(X, A("z1"), A("z1")), IdenticalCenters);
    CHECK_THROWS_AS(reduce_product(X, {{A("z1"), 1}, {A("z1"), 2}}), IdenticalCenters);
}

TEST_CASE("general pair reduction degenerates to the simple one") {
    tsup::check_expr_equal(reduce_pair_general(X, A("z1"), 1, A("z2"), 1),
                           reduce_pair_simple(X, A("z1"), A("z2")));
}

TEST_CASE("degree lifting agrees with parameter differentiation") {
    // (n1, n2) = (2, 1) is d/dz1 of the simple reduction
    DistExpr lifted = reduce_pair_general(X, A("z1"), 2, A("z2"), 1);
    DistExpr via_diff = normalize(differentiate(reduce_pair_simple(X, A("z1"), A("z2")),
                                                Var("z1")));
    tsup::check_expr_equal(lifted, via_diff);

    // (2, 2) needs both derivatives
    DistExpr lifted22 = reduce_pair_general(X, A("z1"), 2, A("z2"), 2);
    DistExpr via_diff22 =
        normalize(differentiate(differentiate(reduce_pair_simple(X, A("z1"), A("z2")),
                                              Var("z1")),
                                Var("z2")));
    tsup::check_expr_equal(lifted22, via_diff22);
}

TEST_CASE("the (2,1) reduction carries the differentiated delta chain") {
    DistExpr red = reduce_pair_general(X, A("z1"), 2, A("z2"), 1);
    // the delta part is pi^2 d/dz1 [delta(x-z1) delta(x-z2)] =
    // -pi^2 delta'(x-z1) delta(x-z2), whose normal form is
    // +pi^2 delta'(z1-z2) delta(x-z2)
    bool found = false;
    for (const auto& t : red.terms) {
        if (t.factors.size() == 2 && t.factors[0].is<DeltaF>() && t.factors[1].is<DeltaF>()) {
            CHECK(t.factors[0].as<DeltaF>().order + t.factors[1].as<DeltaF>().order == 1);
            CHECK(t.coeff == PiCoeff::pi_squared());
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("recursive invariance: expanding and re-reducing reproduces the formula") {
    DistExpr e = reduce_pair_simple(X, A("z1"), A("z2"));
    DistExpr again = reduce_in_var(reduce_in_var(e, Var("z1")), X);
    tsup::check_expr_equal(again, e);
    DistExpr again2 = reduce_in_var(reduce_in_var(e, Var("z2")), X);
    tsup::check_expr_equal(again2, e);
}

TEST_CASE("single pole reduces to itself") {
    DistExpr r = reduce_product(X, {{A("z1"), 2}});
    tsup::check_expr_equal(r, N("VP[1/(x-z1)^2]"));
}

TEST_CASE("difference-cluster pairs among the centers rewrite at the greatest variable") {
    // pure center products rewrite (Arnold-style identity with the delta term)
    DistExpr lhs = reduce_in_var(P("VP[1/(z1-z3)] * VP[1/(z2-z3)]"), X);
    DistExpr rhs = N("VP[1/(z1-z2)] * VP[1/(z2-z3)] - VP[1/(z1-z2)] * VP[1/(z1-z3)] "
                     "+ pi^2 * delta(z1-z3) * delta(z2-z3)");
    tsup::check_expr_equal(lhs, rhs);
    // the basis products are left alone
    DistExpr keep = reduce_in_var(P("VP[1/(z1-z2)] * VP[1/(z1-z3)]"), X);
    REQUIRE(keep.terms.size() == 1);
    CHECK(keep.terms[0].factors.size() == 2);
    // mixed products with the reduction variable are preserved
    DistExpr mixed = reduce_in_var(P("VP[1/(z1-z2)] * VP[1/(x-z2)]"), X);
    REQUIRE(mixed.terms.size() == 1);
    CHECK(mixed.terms[0].factors.size() == 2);
}

TEST_CASE("reduce_in_var leaves at most one pole of the variable per term") {
    DistExpr r = reduce_in_var(P("VP[1/(x-z1)] * VP[1/(x-z2)] * VP[1/(x-z3)]"), X);
    for (const auto& t : r.terms) {
        int count = 0;
        for (const auto& f : t.factors)
            if (f.is<VPPoleF>() && f.as<VPPoleF>().arg.depends_on(X)) ++count;
        CHECK(count <= 1);
    }
}

TEST_CASE("three-pole product is invariant under permutations of the poles") {
    std::vector<std::pair<Affine, int>> poles = {{A("z1"), 1}, {A("z2"), 1}, {A("z3"), 1}};
    DistExpr ref = reduce_product(X, poles);
    std::sort(poles.begin(), poles.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    int perms = 0;
    do {
        tsup::check_expr_equal(reduce_product(X, poles), ref);
        ++perms;
    } while (std::next_permutation(poles.begin(), poles.end(), [](const auto& a, const auto& b) {
        return a.first < b.first;
    }));
    CHECK(perms == 6);
}

TEST_CASE("four poles: both inductive routes agree") {
    DistExpr route1 = reduce_product(
        X, {{A("z1"), 1}, {A("z2"), 1}, {A("z3"), 1}, {A("z4"), 1}});
    // multiply two pair reductions and re-reduce
    DistExpr e12 = reduce_pair_simple(X, A("z1"), A("z2"));
    DistExpr e34 = reduce_pair_simple(X, A("z3"), A("z4"));
    DistExpr prod;
    for (const auto& a : e12.terms) {
        for (const auto& b : e34.terms) {
            DistTerm t;
            t.coeff = a.coeff * b.coeff;
            t.factors = a.factors;
            t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
            prod.terms.push_back(std::move(t));
        }
    }
    DistExpr route2 = reduce_in_var(prod, X);
    tsup::check_expr_equal(route1, route2);
}

TEST_CASE("four poles: the fully coincident delta chain carries -pi^4") {
    DistExpr r = reduce_product(
        X, {{A("z1"), 1}, {A("z2"), 1}, {A("z3"), 1}, {A("z4"), 1}});
    DistExpr want_factors = N("delta(x-z4)*delta(z1-z4)*delta(z2-z4)*delta(z3-z4)");
    REQUIRE(want_factors.terms.size() == 1);
    bool found = false;
    for (const auto& t : r.terms) {
        if (t.factors.size() != 4) continue;
        bool all = true;
        for (size_t i = 0; i < 4; ++i)
            all = all && factor_equal(t.factors[i], want_factors.terms[0].factors[i]);
        if (all) {
            found = true;
            CHECK(t.coeff == -PiCoeff::pi_fourth());
        }
    }
    CHECK(found);
}
