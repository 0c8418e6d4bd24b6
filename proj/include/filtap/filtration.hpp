#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filtap/ideal.hpp"

namespace filtap {

/// max(0, slope*j + offset)
struct AffineIndex {
  long slope = 1;
  long offset = 0;
  unsigned at(unsigned j) const;
  std::string to_string() const;
};

/// Rule j ↦ ideal, as a small expression tree.
struct FiltrationRule {
  enum class Kind { Powers, Fixed, Scaled, Sum, Product, Cap };
  Kind kind = Kind::Fixed;
  MonomialIdeal base;   // Powers, Fixed, Scaled (the powered ideal)
  MonomialIdeal scale;  // Scaled: the constant factor
  AffineIndex exponent;
  std::vector<std::shared_ptr<const FiltrationRule>> children;

  MonomialIdeal evaluate(unsigned j) const;
  std::string to_string() const;
};

using RulePtr = std::shared_ptr<const FiltrationRule>;

/// A descending chain of monomial ideals, materialized for 0..j_max.
class Filtration {
public:
  /// Throws NotDescending if some ideal_at(j+1) is not inside ideal_at(j).
  Filtration(ContextPtr ctx, RulePtr rule, unsigned j_max);

  static Filtration powers(const MonomialIdeal& base, unsigned j_max, AffineIndex exponent = {});

  const ContextPtr& context() const noexcept { return ctx_; }
  const FiltrationRule& rule() const noexcept { return *rule_; }
  const RulePtr& rule_ptr() const noexcept { return rule_; }
  unsigned j_max() const noexcept { return static_cast<unsigned>(ideals_.size() - 1); }
  /// Throws InvalidInput beyond j_max.
  const MonomialIdeal& ideal_at(unsigned j) const;

  /// Same rule re-materialized in a context sharing the x variables.
  Filtration embedded(const ContextPtr& target) const;

private:
  ContextPtr ctx_;
  RulePtr rule_;
  std::vector<MonomialIdeal> ideals_;
};

/// Rule syntax: powers(I, aff), fixed(I), scaled(A, I, aff), sum(r, ...),
/// prod(r, ...), cap(r, ...). Ideals are `[x1, x2^2]` or `m`, optionally
/// raised to a literal power (`[x1, x2]^2`, `m^3`). `aff` is an affine
/// expression in j such as `2*j+1`.
RulePtr parse_filtration_rule(std::string_view src, const ContextPtr& ctx);

/// I_{N+extra} ⊆ (q_set) with q_set the generators of I_N.
struct FGCertificate {
  unsigned N = 0;
  unsigned extra = 0;
  std::vector<Monomial> q_set;
};

/// Smallest extra ≤ search_limit with I_{N+extra} ⊆ (generators of I_N).
/// Errors: InvalidInput when N + search_limit > j_max, SearchExhausted.
FGCertificate weak_fg_check(const Filtration& f, unsigned N, unsigned search_limit);

struct CofinalTable {
  /// a_into_b[j] = least d with A_d ⊆ B_j; b_into_a symmetrically.
  std::vector<unsigned> a_into_b;
  std::vector<unsigned> b_into_a;
  /// On refusal: which direction failed ("A->B" or "B->A") and at which j.
  std::optional<std::string> failed_direction;
  std::optional<unsigned> failed_at;
  explicit operator bool() const noexcept { return !failed_at.has_value(); }
};

CofinalTable filtrations_cofinal(const Filtration& a, const Filtration& b, unsigned range);

}  // namespace filtap
