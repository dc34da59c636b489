#pragma once

#include <map>
#include <string>

#include "vpcalc/expr.hpp"

namespace vpcalc::dsl {

/// Named test functions available to a parse. Names not found here resolve
/// to interned symbolic placeholders, so identical names parse to
/// structurally equal factors.
struct Context {
    std::map<std::string, SmoothPtr> functions;
};

/// Grammar (documented in the README):
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := coeff ('*' factor)* | factor ('*' factor)*
///   factor := 'VP[1/(' affine ')' ('^' int)? ']' | 'log|' affine '|'
///           | 'delta' ('^(' int ')')? '(' affine ')' | 'theta(' affine ')'
///           | ident '(' affine (',' affine)* ')'
///   coeff  := catom | '(' catom (('+'|'-') catom)* ')'
///   catom  := rational ('*' 'pi^' even)? | 'pi^' even
///   affine := ['-'] aterm (('+'|'-') aterm)* ; aterm := rational ('*' var)? | var
/// No implicit multiplication; pi appears only as pi^2, pi^4, ...
DistExpr parse_expr(const std::string& src, const Context& ctx = {});

Affine parse_affine(const std::string& src);

std::string print_expr(const DistExpr& e);
std::string print_factor(const Factor& f);

/// Interned symbolic function handle; evaluation throws until bound.
SmoothPtr symbolic_function(const std::string& name, int arity);

} // namespace vpcalc::dsl
