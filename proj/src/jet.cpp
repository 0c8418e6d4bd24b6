#include "filtap/jet.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "filtap/error.hpp"

namespace filtap {

namespace {

using Terms = Jet::Terms;

constexpr unsigned kUnbounded = std::numeric_limits<unsigned>::max();

void add_term(Terms& terms, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

// Product truncated at weighted degree `cap`; `dropped` reports whether a
// nonzero contribution above the cap was discarded.
Terms mul_terms(const Terms& a, const Terms& b, unsigned cap, bool& dropped) {
  Terms out;
  for (const auto& [ma, ca] : a) {
    if (ma.degree() > cap) {
      dropped = true;
      break;
    }
    for (const auto& [mb, cb] : b) {
      if (ma.degree() + mb.degree() > cap) {
        dropped = true;
        break;
      }
      add_term(out, ma.times(mb), ca * cb);
    }
  }
  return out;
}

unsigned binary_order(const Jet& a, const Jet& b) {
  if (a.exact() && !b.exact()) return b.order();
  if (b.exact() && !a.exact()) return a.order();
  if (a.exact() && b.exact()) return std::max(a.order(), b.order());
  return std::min(a.order(), b.order());
}

bool full_divides(const Monomial& d, const Monomial& m) {
  const auto& de = d.exponents();
  const auto& me = m.exponents();
  for (std::size_t i = 0; i < de.size(); ++i)
    if (de[i] > me[i]) return false;
  return true;
}

Monomial full_quotient(const VarContext& ctx, const Monomial& m, const Monomial& d) {
  std::vector<unsigned> e(m.exponents());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= d.exponents()[i];
  return Monomial(ctx, std::move(e));
}

// Lexicographically largest monomial of a homogeneous block (the first one
// in GrlexLess order within a fixed degree).
const std::pair<const Monomial, Rational>& leading(const Terms& t) { return *t.begin(); }

}  // namespace

Jet::Jet(ContextPtr ctx, unsigned order, bool exact) : ctx_(std::move(ctx)), order_(order), exact_(exact) {}

Jet Jet::constant(ContextPtr ctx, const Rational& value, unsigned order) {
  Jet j(ctx, order, true);
  if (value != 0) j.terms_.emplace(Monomial::one(*ctx), value);
  return j;
}

Jet Jet::variable(const ContextPtr& ctx, const std::string& name, unsigned order) {
  auto idx = ctx->index_of(name);
  if (!idx) throw Error(Errc::UnknownVariable, name);
  return variable(ctx, *idx, order);
}

Jet Jet::variable(const ContextPtr& ctx, std::size_t index, unsigned order) {
  Monomial m = Monomial::variable(*ctx, index);
  Jet j(ctx, std::max(order, m.degree()), true);
  j.terms_.emplace(m, Rational(1));
  return j;
}

Jet Jet::monomial(const ContextPtr& ctx, const Monomial& m, const Rational& coeff) {
  Jet j(ctx, m.degree(), true);
  if (coeff != 0) j.terms_.emplace(m, coeff);
  return j;
}

Jet Jet::from_terms(ContextPtr ctx, const Terms& terms, unsigned order, bool exact) {
  Jet j(std::move(ctx), order, exact);
  for (const auto& [m, c] : terms) {
    if (c == 0) continue;
    if (m.degree() > order) {
      j.exact_ = false;
      continue;
    }
    j.terms_.emplace(m, c);
  }
  return j;
}

Jet Jet::polynomial(ContextPtr ctx, const Terms& terms) {
  Jet j(std::move(ctx), 0, true);
  for (const auto& [m, c] : terms)
    if (c != 0) j.terms_.emplace(m, c);
  j.order_ = j.degree();
  return j;
}

Rational Jet::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Jet::degree() const noexcept { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

Valuation Jet::ord() const noexcept {
  return terms_.empty() ? Valuation::infinity() : Valuation(terms_.begin()->first.degree());
}

Jet Jet::constant_part() const { return homogeneous_part(0); }

Jet Jet::homogeneous_part(unsigned d) const {
  Jet j(ctx_, order_, exact_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == d) j.terms_.emplace(m, c);
  return j;
}

bool Jet::depends_on_y() const noexcept {
  for (std::size_t k = 0; k < ctx_->y_count(); ++k)
    if (depends_on(ctx_->y_index(k))) return true;
  return false;
}

bool Jet::depends_on(std::size_t var_index) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.exponent(var_index) != 0; });
}

Jet Jet::at_order(unsigned order) const {
  if (order > order_ && !exact_)
    throw Error(Errc::InsufficientOrder,
                "jet known to order " + std::to_string(order_) + ", requested " + std::to_string(order));
  return from_terms(ctx_, terms_, order, exact_);
}

Jet Jet::inexact() const {
  Jet j = *this;
  j.exact_ = false;
  return j;
}

Jet Jet::operator-() const {
  Jet j = *this;
  for (auto& [m, c] : j.terms_) c = -c;
  return j;
}

Jet add_impl(const Jet& a, const Jet& b, bool subtract) {
  require_same_context(a.ctx_, b.ctx_, "jet addition");
  unsigned order = binary_order(a, b);
  Jet out(a.ctx_, order, a.exact_ && b.exact_);
  for (const auto& [m, c] : a.terms_) {
    if (m.degree() > order) {
      out.exact_ = false;
      break;
    }
    out.terms_.emplace(m, c);
  }
  for (const auto& [m, c] : b.terms_) {
    if (m.degree() > order) {
      out.exact_ = false;
      break;
    }
    add_term(out.terms_, m, subtract ? Rational(-c) : c);
  }
  return out;
}

Jet& Jet::operator+=(const Jet& other) { return *this = add_impl(*this, other, false); }
Jet& Jet::operator-=(const Jet& other) { return *this = add_impl(*this, other, true); }
Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }

Jet operator*(const Jet& a, const Jet& b) {
  require_same_context(a.ctx_, b.ctx_, "jet multiplication");
  unsigned order = binary_order(a, b);
  bool dropped = false;
  Terms t = mul_terms(a.terms_, b.terms_, order, dropped);
  Jet out(a.ctx_, order, a.exact_ && b.exact_ && !dropped);
  out.terms_ = std::move(t);
  return out;
}

Jet mul_exact(const Jet& a, const Jet& b) {
  if (!a.exact() || !b.exact()) return a * b;
  return a.at_order(a.order() + b.order()) * b;
}

Jet mul_tracked(const Jet& a, const Jet& b, unsigned cap) {
  require_same_context(a.context(), b.context(), "jet product");
  Valuation known = Valuation::infinity();
  if (!b.exact()) known = std::min(known, Valuation(b.order()) + a.ord());
  if (!a.exact()) known = std::min(known, Valuation(a.order()) + b.ord());
  unsigned order = known.is_infinite() ? cap : std::min(cap, known.value());
  bool dropped = false;
  Terms t = mul_terms(a.terms(), b.terms(), order, dropped);
  return Jet::from_terms(a.context(), t, order, a.exact() && b.exact() && !dropped);
}

Jet Jet::scaled(const Rational& factor) const {
  if (factor == 0) return Jet(ctx_, order_, exact_);
  Jet j = *this;
  for (auto& [m, c] : j.terms_) c *= factor;
  return j;
}

bool operator==(const Jet& a, const Jet& b) {
  return same_context(a.ctx_, b.ctx_) && a.order_ == b.order_ && a.terms_ == b.terms_;
}

bool agree_to_order(const Jet& a, const Jet& b, unsigned order) {
  require_same_context(a.context(), b.context(), "jet comparison");
  auto low = [order](const Jet& j) {
    Terms t;
    for (const auto& [m, c] : j.terms())
      if (m.degree() <= order) t.emplace(m, c);
    return t;
  };
  return low(a) == low(b);
}

Jet power(const Jet& base, unsigned exponent) {
  Jet result = Jet::constant(base.context(), 1, base.order());
  Jet b = base;
  while (exponent > 0) {
    if (exponent & 1U) result = result * b;
    exponent >>= 1U;
    if (exponent > 0) b = b * b;
  }
  return result;
}

Jet partial_derivative(const Jet& a, const std::string& var) {
  auto idx = a.ctx().index_of(var);
  if (!idx) throw Error(Errc::UnknownVariable, var);
  return partial_derivative(a, *idx);
}

Jet partial_derivative(const Jet& a, std::size_t var_index) {
  const VarContext& ctx = a.ctx();
  if (var_index >= ctx.size()) throw Error(Errc::UnknownVariable, "index " + std::to_string(var_index));
  unsigned w = ctx.weight(var_index);
  unsigned order = a.order() >= w ? a.order() - w : 0;
  Terms out;
  for (const auto& [m, c] : a.terms()) {
    unsigned e = m.exponent(var_index);
    if (e == 0) continue;
    std::vector<unsigned> ex(m.exponents());
    ex[var_index] -= 1;
    add_term(out, Monomial(ctx, std::move(ex)), c * e);
  }
  return Jet::from_terms(a.context(), out, order, a.exact());
}

Jet compose(const Jet& p, const ContextPtr& target, std::span<const Jet> images) {
  const VarContext& src = p.ctx();
  if (images.size() != src.size()) throw Error(Errc::ContextMismatch, "compose: image count");
  std::vector<bool> used(src.size(), false);
  std::vector<unsigned> max_exp(src.size(), 0);
  for (const auto& [m, c] : p.terms())
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (m.exponent(i) > 0) used[i] = true;
      max_exp[i] = std::max(max_exp[i], m.exponent(i));
    }

  std::optional<unsigned> cap;
  auto limit = [&](unsigned o) { cap = cap ? std::min(*cap, o) : o; };
  if (!p.exact()) limit(p.order());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!used[i]) continue;
    const Jet& img = images[i];
    require_same_context(img.context(), target, "compose: image context");
    if (!img.exact()) limit(img.order());
    if (!p.exact() && src.weight(i) != 0 && !img.constant_part().is_zero())
      throw Error(Errc::IllFormedComposition,
                  "variable '" + src.name(i) + "' is sent to a jet with nonzero constant term");
  }
  unsigned working = cap.value_or(kUnbounded);
  bool dropped = false;

  // powers[i][e] = images[i]^e, truncated at the working order
  const VarContext& tgt = *target;
  std::vector<std::vector<Terms>> powers(src.size());
  Terms one;
  one.emplace(Monomial::one(tgt), Rational(1));
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!used[i]) continue;
    powers[i].push_back(one);
    for (unsigned e = 1; e <= max_exp[i]; ++e)
      powers[i].push_back(mul_terms(powers[i].back(), images[i].terms(), working, dropped));
  }

  Terms out;
  for (const auto& [m, c] : p.terms()) {
    Terms acc;
    acc.emplace(Monomial::one(tgt), c);
    for (std::size_t i = 0; i < src.size() && !acc.empty(); ++i) {
      unsigned e = m.exponent(i);
      if (e == 0) continue;
      acc = mul_terms(acc, powers[i][e], working, dropped);
    }
    for (const auto& [mm, cc] : acc) add_term(out, mm, cc);
  }

  if (!cap) {
    unsigned order = 0;
    for (std::size_t i = 0; i < src.size(); ++i)
      if (used[i]) order = std::max(order, images[i].order());
    Jet r = Jet::polynomial(target, out);
    return Jet::from_terms(target, out, std::max({order, p.order(), r.degree()}), true);
  }
  return Jet::from_terms(target, out, working, false);
}

Jet substitute(const Jet& p, std::span<const Jet> values) {
  const VarContext& ctx = p.ctx();
  if (values.size() != ctx.y_count()) throw Error(Errc::ContextMismatch, "substitute: one value per y variable");
  std::vector<Jet> images;
  images.reserve(ctx.size());
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (ctx.is_y(i))
      images.push_back(values[i - ctx.x_count()]);
    else
      images.push_back(Jet::variable(p.context(), i));
  }
  return compose(p, p.context(), images);
}

Jet specialize(const Jet& p, std::size_t var_index, const Rational& value) {
  const VarContext& ctx = p.ctx();
  Terms out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<unsigned> e(m.exponents());
    unsigned k = e.at(var_index);
    e[var_index] = 0;
    Rational factor = 1;
    for (unsigned i = 0; i < k; ++i) factor *= value;
    add_term(out, Monomial(ctx, std::move(e)), c * factor);
  }
  return Jet::from_terms(p.context(), out, p.order(), p.exact());
}

Jet divide_exact(const Jet& f, const Jet& h, unsigned target_order) {
  require_same_context(f.context(), h.context(), "divide_exact");
  if (h.is_zero()) throw Error(Errc::InvalidInput, "division by the zero jet");
  const VarContext& ctx = f.ctx();
  const unsigned e = h.ord().value();
  const unsigned top = target_order + e;
  if (!f.exact() && f.order() < top)
    throw Error(Errc::InsufficientOrder, "dividend known to order " + std::to_string(f.order()) +
                                             ", need " + std::to_string(top));
  if (!h.exact() && h.order() < top)
    throw Error(Errc::InsufficientOrder, "divisor known to order " + std::to_string(h.order()) +
                                             ", need " + std::to_string(top));

  // Homogeneous blocks of f and h.
  std::map<unsigned, Terms> fb, hb;
  for (const auto& [m, c] : f.terms())
    if (m.degree() <= top) fb[m.degree()].emplace(m, c);
  for (const auto& [m, c] : h.terms())
    if (m.degree() <= top) hb[m.degree()].emplace(m, c);

  for (const auto& [d, block] : fb)
    if (d < e) throw Error(Errc::NotDivisible, "degree " + std::to_string(d), std::nullopt);

  const Terms& lead_form = hb.at(e);
  const auto& [lead_m, lead_c] = leading(lead_form);
  std::vector<Terms> q(target_order + 1);

  for (unsigned d = 0; d <= target_order; ++d) {
    // rhs = f_{d+e} - sum_{e' > e} q_{d+e-e'} h_{e'}
    Terms rhs;
    if (auto it = fb.find(d + e); it != fb.end()) rhs = it->second;
    for (const auto& [ed, hblock] : hb) {
      if (ed <= e || ed > d + e) continue;
      const Terms& qb = q[d + e - ed];
      for (const auto& [mq, cq] : qb)
        for (const auto& [mh, ch] : hblock) add_term(rhs, mq.times(mh), -(cq * ch));
    }
    // Exact division of the homogeneous rhs by the lowest form of h.
    while (!rhs.empty()) {
      const auto [m, c] = leading(rhs);
      if (!full_divides(lead_m, m))
        throw Error(Errc::NotDivisible, "degree " + std::to_string(d + e));
      Monomial qm = full_quotient(ctx, m, lead_m);
      Rational qc = c / lead_c;
      add_term(q[d], qm, qc);
      for (const auto& [mh, ch] : lead_form) add_term(rhs, qm.times(mh), -(qc * ch));
    }
  }

  Terms all;
  for (const auto& block : q)
    for (const auto& [m, c] : block) all.emplace(m, c);
  Jet quotient = Jet::from_terms(f.context(), all, target_order, false);
  if (f.exact() && h.exact() && f.degree() <= top) {
    Jet qe = Jet::polynomial(f.context(), all);
    Jet prod = qe.at_order(qe.degree() + h.degree()) * h;
    if (prod.terms() == f.terms()) return Jet::from_terms(f.context(), all, target_order, true);
  }
  return quotient;
}

Jet embed(const Jet& a, const ContextPtr& target) {
  const VarContext& src = a.ctx();
  std::vector<std::size_t> map(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto idx = target->index_of(src.name(i));
    if (!idx && !a.depends_on(i)) {
      map[i] = target->size();
      continue;
    }
    if (!idx) throw Error(Errc::ContextMismatch, "embed: variable '" + src.name(i) + "' missing");
    if (target->weight(*idx) != src.weight(i)) throw Error(Errc::ContextMismatch, "embed: weight change");
    map[i] = *idx;
  }
  Terms out;
  for (const auto& [m, c] : a.terms()) {
    std::vector<unsigned> e(target->size(), 0);
    for (std::size_t i = 0; i < src.size(); ++i)
      if (map[i] < e.size()) e[map[i]] = m.exponent(i);
    out.emplace(Monomial(*target, std::move(e)), c);
  }
  return Jet::from_terms(target, out, a.order(), a.exact());
}

}  // namespace filtap
