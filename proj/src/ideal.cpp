#include "filtap/ideal.hpp"

#include <algorithm>

#include "filtap/error.hpp"

namespace filtap {

namespace {

std::vector<Monomial> minimize(const VarContext& ctx, std::vector<Monomial> gens) {
  std::sort(gens.begin(), gens.end(), GrlexLess{});
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  std::vector<Monomial> out;
  // Sorted by degree, so a divisor always precedes its multiples.
  for (const auto& g : gens) {
    bool redundant = std::any_of(out.begin(), out.end(), [&](const Monomial& h) { return h.divides(g, ctx); });
    if (!redundant) out.push_back(g);
  }
  return out;
}

void check_x_only(const VarContext& ctx, const Monomial& m) {
  for (std::size_t i = ctx.x_count(); i < ctx.size(); ++i)
    if (m.exponent(i) != 0) throw Error(Errc::InvalidInput, "monomial ideal generators must involve x only");
}

}  // namespace

MonomialIdeal::MonomialIdeal(ContextPtr ctx, std::vector<Monomial> generators) : ctx_(std::move(ctx)) {
  for (const auto& g : generators) check_x_only(*ctx_, g);
  gens_ = minimize(*ctx_, std::move(generators));
}

MonomialIdeal MonomialIdeal::unit(const ContextPtr& ctx) { return {ctx, {Monomial::one(*ctx)}}; }

MonomialIdeal MonomialIdeal::maximal(const ContextPtr& ctx) {
  std::vector<Monomial> g;
  for (std::size_t i = 0; i < ctx->x_count(); ++i) g.push_back(Monomial::variable(*ctx, i));
  return {ctx, std::move(g)};
}

bool MonomialIdeal::contains(const Monomial& m) const {
  return std::any_of(gens_.begin(), gens_.end(), [&](const Monomial& g) { return g.divides(m, *ctx_); });
}

Valuation MonomialIdeal::min_degree() const noexcept {
  return gens_.empty() ? Valuation::infinity() : Valuation(gens_.front().degree());
}

MonomialIdeal sum(const MonomialIdeal& a, const MonomialIdeal& b) {
  require_same_context(a.context(), b.context(), "ideal sum");
  std::vector<Monomial> g = a.generators();
  g.insert(g.end(), b.generators().begin(), b.generators().end());
  return {a.context(), std::move(g)};
}

MonomialIdeal product(const MonomialIdeal& a, const MonomialIdeal& b) {
  require_same_context(a.context(), b.context(), "ideal product");
  std::vector<Monomial> g;
  for (const auto& p : a.generators())
    for (const auto& q : b.generators()) g.push_back(p.times(q));
  return {a.context(), std::move(g)};
}

MonomialIdeal intersection(const MonomialIdeal& a, const MonomialIdeal& b) {
  require_same_context(a.context(), b.context(), "ideal intersection");
  std::vector<Monomial> g;
  for (const auto& p : a.generators())
    for (const auto& q : b.generators()) g.push_back(p.lcm(q, *a.context()));
  return {a.context(), std::move(g)};
}

MonomialIdeal power(const MonomialIdeal& a, unsigned k) {
  MonomialIdeal result = MonomialIdeal::unit(a.context());
  for (unsigned i = 0; i < k; ++i) result = product(result, a);
  return result;
}

bool contains_ideal(const MonomialIdeal& a, const MonomialIdeal& b) {
  require_same_context(a.context(), b.context(), "ideal containment");
  return std::all_of(b.generators().begin(), b.generators().end(),
                     [&](const Monomial& g) { return a.contains(g); });
}

Jet times_monomial(const Jet& f, const Monomial& m, const Rational& coeff) {
  Jet::Terms out;
  if (coeff != 0)
    for (const auto& [fm, fc] : f.terms()) out.emplace(fm.times(m), fc * coeff);
  return Jet::from_terms(f.context(), out, f.order() + m.degree(), f.exact());
}

Jet MembershipCertificate::recombine(const ContextPtr& ctx, unsigned order, bool exact) const {
  Jet acc = Jet::zero(ctx, order);
  if (!exact) acc = acc.inexact();
  for (std::size_t i = 0; i < generators.size(); ++i) acc += times_monomial(cofactors[i], generators[i]);
  return acc;
}

bool MembershipCertificate::verifies(const Jet& f) const {
  if (generators.size() != cofactors.size()) return false;
  for (const auto& c : cofactors)
    if (!same_context(c.context(), f.context())) return false;
  Jet r = recombine(f.context(), f.order(), f.exact());
  // two exact polynomials are equal whatever order they were read at
  if (r.exact() && f.exact()) return r.terms() == f.terms();
  return r.order() == f.order() && r.terms() == f.terms();
}

Membership contains_jet(const MonomialIdeal& ideal, const Jet& f) {
  require_same_context(ideal.context(), f.context(), "contains_jet");
  const VarContext& ctx = f.ctx();
  const auto& gens = ideal.generators();
  std::vector<Jet::Terms> cof(gens.size());
  for (const auto& [m, c] : f.terms()) {
    auto it = std::find_if(gens.begin(), gens.end(), [&](const Monomial& g) { return g.divides(m, ctx); });
    if (it == gens.end()) return Membership{std::nullopt, m};
    cof[static_cast<std::size_t>(it - gens.begin())].emplace(it->cofactor_in(m, ctx), c);
  }
  MembershipCertificate cert;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    unsigned d = gens[i].degree();
    unsigned order = f.order() >= d ? f.order() - d : 0;
    cert.generators.push_back(gens[i]);
    cert.cofactors.push_back(Jet::from_terms(f.context(), cof[i], order, f.exact()));
  }
  return Membership{std::move(cert), std::nullopt};
}

MonomialIdeal embed(const MonomialIdeal& ideal, const ContextPtr& target) {
  std::vector<Monomial> g;
  for (const auto& m : ideal.generators())
    g.push_back(embed(Jet::monomial(ideal.context(), m), target).terms().begin()->first);
  return {target, std::move(g)};
}

Jet reduce_mod(const Jet& f, const MonomialIdeal& J) {
  require_same_context(f.context(), J.context(), "reduce_mod");
  Jet::Terms out;
  for (const auto& [m, c] : f.terms())
    if (!J.contains(m)) out.emplace(m, c);
  return Jet::from_terms(f.context(), out, f.order(), f.exact());
}

}  // namespace filtap
