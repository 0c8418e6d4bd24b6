#pragma once

#include <optional>
#include <vector>

#include "filtap/context.hpp"
#include "filtap/jet.hpp"
#include "filtap/monomial.hpp"

namespace filtap {

/// Finitely generated monomial ideal in the x variables.
///
/// Generators form a divisibility antichain kept in graded-lex order. The
/// zero ideal has no generators; the unit ideal is generated by 1.
class MonomialIdeal {
public:
  MonomialIdeal() = default;
  MonomialIdeal(ContextPtr ctx, std::vector<Monomial> generators);

  static MonomialIdeal zero(ContextPtr ctx) { return {std::move(ctx), {}}; }
  static MonomialIdeal unit(const ContextPtr& ctx);
  /// (x_1, ..., x_m)
  static MonomialIdeal maximal(const ContextPtr& ctx);

  const ContextPtr& context() const noexcept { return ctx_; }
  const std::vector<Monomial>& generators() const noexcept { return gens_; }
  bool is_zero() const noexcept { return gens_.empty(); }
  bool is_unit() const noexcept { return gens_.size() == 1 && gens_.front().is_one(); }

  bool contains(const Monomial& m) const;
  /// Smallest generator degree; infinite for the zero ideal.
  Valuation min_degree() const noexcept;

  friend bool operator==(const MonomialIdeal& a, const MonomialIdeal& b) {
    return same_context(a.ctx_, b.ctx_) && a.gens_ == b.gens_;
  }

private:
  ContextPtr ctx_;
  std::vector<Monomial> gens_;
};

MonomialIdeal sum(const MonomialIdeal& a, const MonomialIdeal& b);
MonomialIdeal product(const MonomialIdeal& a, const MonomialIdeal& b);
MonomialIdeal intersection(const MonomialIdeal& a, const MonomialIdeal& b);
MonomialIdeal power(const MonomialIdeal& a, unsigned k);

/// a ⊇ b
bool contains_ideal(const MonomialIdeal& a, const MonomialIdeal& b);

/// Witness that f = Σ cofactor_i · generator_i.
struct MembershipCertificate {
  std::vector<Monomial> generators;
  std::vector<Jet> cofactors;

  /// Σ cofactor_i · generator_i, at the order the cofactors carry.
  Jet recombine(const ContextPtr& ctx, unsigned order, bool exact) const;
  /// Exact recombination check against f.
  bool verifies(const Jet& f) const;
};

struct Membership {
  std::optional<MembershipCertificate> certificate;
  /// First monomial of f (graded-lex) outside the ideal, on refusal.
  std::optional<Monomial> offending;

  explicit operator bool() const noexcept { return certificate.has_value(); }
};

/// Each term of f is attributed to the first generator (graded-lex) that
/// divides it. Cofactor i is known to order f.order() - deg(generator i).
Membership contains_jet(const MonomialIdeal& ideal, const Jet& f);

/// Drops every term of f lying in J.
Jet reduce_mod(const Jet& f, const MonomialIdeal& J);

/// Same generators in another context sharing the x variable names.
MonomialIdeal embed(const MonomialIdeal& ideal, const ContextPtr& target);

/// f · coeff · m with the order raised by deg(m).
Jet times_monomial(const Jet& f, const Monomial& m, const Rational& coeff = 1);

}  // namespace filtap
