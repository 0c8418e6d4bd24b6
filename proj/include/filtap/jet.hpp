#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "filtap/context.hpp"
#include "filtap/monomial.hpp"
#include "filtap/rational.hpp"

namespace filtap {

/// Truncated multivariate power series with exact rational coefficients.
///
/// A jet knows its coefficients reliably up to weighted degree `order()`.
/// When `exact()` is set the stored terms are the whole (polynomial) value,
/// so the jet may be re-read at any larger order without loss.
///
/// Binary operations work at the order of the non-exact operand when only
/// one is exact, the minimum when neither is and the maximum when both are.
/// The result is exact only if both operands were exact and no term had to
/// be dropped.
class Jet {
public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  Jet() = default;
  Jet(ContextPtr ctx, unsigned order, bool exact = true);

  static Jet zero(ContextPtr ctx, unsigned order = 0) { return Jet(std::move(ctx), order, true); }
  static Jet constant(ContextPtr ctx, const Rational& value, unsigned order = 0);
  static Jet variable(const ContextPtr& ctx, const std::string& name, unsigned order = 1);
  static Jet variable(const ContextPtr& ctx, std::size_t index, unsigned order = 1);
  static Jet monomial(const ContextPtr& ctx, const Monomial& m, const Rational& coeff = 1);
  /// Builds from raw terms; zero coefficients are skipped and terms above
  /// `order` are dropped (clearing the exact flag).
  static Jet from_terms(ContextPtr ctx, const Terms& terms, unsigned order, bool exact);
  /// Exact polynomial whose order is its degree.
  static Jet polynomial(ContextPtr ctx, const Terms& terms);

  const ContextPtr& context() const noexcept { return ctx_; }
  const VarContext& ctx() const noexcept { return *ctx_; }
  unsigned order() const noexcept { return order_; }
  bool exact() const noexcept { return exact_; }
  const Terms& terms() const noexcept { return terms_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  Rational coefficient(const Monomial& m) const;
  /// Largest weighted degree among stored terms (0 for the zero jet).
  unsigned degree() const noexcept;
  /// Lowest weighted degree among stored terms; infinite for zero.
  Valuation ord() const noexcept;
  /// Weighted-degree-0 part (a constant, or a polynomial in t).
  Jet constant_part() const;
  Jet homogeneous_part(unsigned degree) const;
  /// True if any stored term involves a y variable.
  bool depends_on_y() const noexcept;
  bool depends_on(std::size_t var_index) const noexcept;

  /// Re-reads the jet at order `order`: truncates if lower; raising the order
  /// is allowed for exact jets only (Error InsufficientOrder otherwise).
  Jet at_order(unsigned order) const;
  /// Same terms, same order, exact flag cleared.
  Jet inexact() const;

  Jet operator-() const;
  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet scaled(const Rational& factor) const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);

  /// Same context, terms and order (exactness is not compared).
  friend bool operator==(const Jet& a, const Jet& b);

private:
  friend Jet add_impl(const Jet& a, const Jet& b, bool subtract);

  ContextPtr ctx_;
  unsigned order_ = 0;
  bool exact_ = true;
  Terms terms_;
};

/// Jets agree on every coefficient up to weighted degree `order`.
bool agree_to_order(const Jet& a, const Jet& b, unsigned order);

Jet power(const Jet& base, unsigned exponent);

/// Product at the order it is actually known to, capped at `cap`:
/// min(a.order + ord(b), b.order + ord(a)), exact operands counting as
/// known everywhere.
Jet mul_tracked(const Jet& a, const Jet& b, unsigned cap);

/// Like operator*, except two exact factors give their full product at the
/// sum of their orders.
Jet mul_exact(const Jet& a, const Jet& b);

/// Formal partial derivative. Weighted variables lower the order by one.
Jet partial_derivative(const Jet& a, const std::string& var);
Jet partial_derivative(const Jet& a, std::size_t var_index);

/// Maps every variable of `p`'s context to a jet in `target` and expands.
/// `images[i]` is the image of variable i. The result is truncated at the
/// smallest order among the non-exact inputs that actually enter; when all
/// inputs are exact the result is an exact polynomial.
/// Throws IllFormedComposition when `p` is inexact and a weighted variable
/// it depends on is sent to a jet with a nonzero constant term.
Jet compose(const Jet& p, const ContextPtr& target, std::span<const Jet> images);

/// Replaces the y variables of `p` by `values` (one per y variable, in the
/// same context). x and t are kept.
Jet substitute(const Jet& p, std::span<const Jet> values);

/// Sets variable `var_index` to the constant `value` (used for t).
Jet specialize(const Jet& p, std::size_t var_index, const Rational& value);

/// Quotient q of f by h: q*h agrees with f up to degree target + ord(h).
/// Solved one homogeneous degree at a time by exact division through the
/// lowest-degree form of h. Errors: NotDivisible (degree of f reported),
/// InsufficientOrder, InvalidInput (h == 0).
Jet divide_exact(const Jet& f, const Jet& h, unsigned target_order);

/// Moves a jet into another context with compatible variable names: every
/// variable the jet actually involves must exist in the target.
Jet embed(const Jet& a, const ContextPtr& target);

}  // namespace filtap
