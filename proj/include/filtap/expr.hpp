#pragma once

#include <string>
#include <string_view>

#include "filtap/context.hpp"
#include "filtap/jet.hpp"

namespace filtap {

class MonomialIdeal;

/// Parses a polynomial in the variables of `ctx`.
///
/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := factor ('*' factor)*
///   factor  := ('+' | '-') factor | primary ('^' INT)?
///   primary := INT ('/' INT)? | NAME | '(' expr ')'
///
/// `^` binds tighter than `*`, which binds tighter than `+`/`-`. The result
/// is an exact jet whose order is its degree. Errors carry the byte offset:
/// SyntaxError, UnknownVariable, NegativeExponent.
Jet parse_polynomial(std::string_view src, const ContextPtr& ctx);

/// Comma-separated pure monomials ("x1^2, x1*x2"); "0" or empty text is the
/// zero ideal. Errors: NotAMonomial (position of the offending item).
MonomialIdeal parse_monomial_ideal(std::string_view src, const ContextPtr& ctx);

/// Expression text with terms in graded-lex order, e.g. "1 + 2*x - 3/4*x^2".
std::string to_expr(const Jet& jet);
std::string to_expr(const Monomial& m, const VarContext& ctx);

/// Jet text with its order attribute: "<expr> | order: N" followed by
/// ", exact" when the exact flag is set. Round-trips through parse_jet.
std::string serialize_jet(const Jet& jet);
Jet parse_jet(std::string_view src, const ContextPtr& ctx);

std::string to_expr(const MonomialIdeal& ideal);

}  // namespace filtap
