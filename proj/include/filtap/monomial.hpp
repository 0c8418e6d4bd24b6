#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "filtap/context.hpp"

namespace filtap {

/// Exponent vector over a VarContext together with its weighted degree.
class Monomial {
public:
  Monomial() = default;
  Monomial(const VarContext& ctx, std::vector<unsigned> exponents);

  static Monomial one(const VarContext& ctx);
  static Monomial variable(const VarContext& ctx, std::size_t index, unsigned power = 1);

  const std::vector<unsigned>& exponents() const noexcept { return exps_; }
  unsigned exponent(std::size_t index) const { return exps_[index]; }
  /// Weighted total degree (t has weight 0).
  unsigned degree() const noexcept { return degree_; }
  bool is_one() const noexcept;

  Monomial times(const Monomial& other) const;
  /// Divisibility over all weighted variables; the t exponent is ignored.
  bool divides(const Monomial& other, const VarContext& ctx) const;
  /// other / *this; requires divides (t exponent of other is kept).
  Monomial cofactor_in(const Monomial& other, const VarContext& ctx) const;
  Monomial lcm(const Monomial& other, const VarContext& ctx) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

private:
  std::vector<unsigned> exps_;
  unsigned degree_ = 0;
};

/// Graded lexicographic order: lower weighted degree first; within a degree,
/// larger exponent of an earlier variable first (x^2, x*y, y^2).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const noexcept;
};

/// Order of a jet: a non-negative integer or infinity (the zero jet).
class Valuation {
public:
  Valuation() = default;  // infinity
  explicit Valuation(unsigned value) : value_(value) {}
  static Valuation infinity() { return {}; }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  unsigned value() const { return value_.value(); }

  friend Valuation operator+(Valuation a, Valuation b) {
    if (a.is_infinite() || b.is_infinite()) return {};
    return Valuation(*a.value_ + *b.value_);
  }
  friend bool operator==(const Valuation& a, const Valuation& b) = default;
  friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    if (a.is_infinite()) return std::strong_ordering::greater;
    if (b.is_infinite()) return std::strong_ordering::less;
    return *a.value_ <=> *b.value_;
  }
  friend bool operator==(const Valuation& a, unsigned b) { return !a.is_infinite() && *a.value_ == b; }

private:
  std::optional<unsigned> value_;
};

}  // namespace filtap
