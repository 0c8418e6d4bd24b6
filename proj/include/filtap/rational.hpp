#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace filtap {

/// Exact rational coefficient. GMP keeps results canonical (gcd 1, positive
/// denominator) after every arithmetic operation.
using Rational = mpq_class;

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Parses "p" or "p/q" (optional leading sign); throws Error(SyntaxError).
Rational parse_rational(std::string_view text);

Rational factorial(unsigned n);

}  // namespace filtap
