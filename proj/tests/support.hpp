// Shared helpers for the test binaries: parsing shorthands and seeded
// random generators for property checks.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "filtap/expr.hpp"
#include "filtap/ideal.hpp"
#include "filtap/jet.hpp"

namespace filtap::test {

inline Jet P(const std::string& text, const ContextPtr& ctx) { return parse_polynomial(text, ctx); }

/// Parsed polynomial re-read at a fixed order (inexact).
inline Jet J(const std::string& text, const ContextPtr& ctx, unsigned order) {
  return parse_polynomial(text, ctx).at_order(order).inexact();
}

inline MonomialIdeal I(const std::string& text, const ContextPtr& ctx) { return parse_monomial_ideal(text, ctx); }

using Rng = std::mt19937_64;

inline Rational random_rational(Rng& rng, int height) {
  std::uniform_int_distribution<int> num(-height, height);
  std::uniform_int_distribution<int> den(1, height);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

/// Every monomial in the variables `vars` (indices) of weighted degree in
/// [lo, hi].
inline std::vector<Monomial> monomials_in(const VarContext& ctx, const std::vector<std::size_t>& vars, unsigned lo,
                                          unsigned hi) {
  std::vector<Monomial> out;
  std::vector<unsigned> e(ctx.size(), 0);
  auto rec = [&](auto&& self, std::size_t k, unsigned deg) -> void {
    if (k == vars.size()) {
      if (deg >= lo) out.emplace_back(ctx, e);
      return;
    }
    for (unsigned p = 0; deg + p <= hi; ++p) {
      e[vars[k]] = p;
      self(self, k + 1, deg + p);
    }
    e[vars[k]] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

inline std::vector<std::size_t> x_indices(const VarContext& ctx) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < ctx.x_count(); ++i) v.push_back(i);
  return v;
}

/// Random jet in the x variables with terms of degree in [min_deg, max_deg].
inline Jet random_x_jet(Rng& rng, const ContextPtr& ctx, unsigned order, unsigned min_deg, unsigned max_deg,
                        double density = 0.5, int height = 3, bool exact = false) {
  std::bernoulli_distribution keep(density);
  Jet::Terms t;
  for (const auto& m : monomials_in(*ctx, x_indices(*ctx), min_deg, max_deg))
    if (keep(rng)) t.emplace(m, random_rational(rng, height));
  Jet j = Jet::from_terms(ctx, t, order, true);
  return exact ? j : j.inexact();
}

}  // namespace filtap::test
