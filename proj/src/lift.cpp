#include "filtap/lift.hpp"

#include <algorithm>
#include <functional>

#include "filtap/error.hpp"
#include "filtap/expr.hpp"

namespace filtap {

namespace {

// Δy = h·M·z with J·M = h·Id.
struct Multiplier {
  Jet h;
  Matrix M;
};

using MultiplierFn = std::function<Multiplier(const JacobianData&)>;

Monomial x_part(const VarContext& ctx, const Monomial& m) {
  std::vector<unsigned> e(ctx.size(), 0);
  for (std::size_t i = 0; i < ctx.x_count(); ++i) e[i] = m.exponent(i);
  return Monomial(ctx, std::move(e));
}

Jet truncate(const Jet& j, unsigned order) { return j.order() > order ? j.at_order(order) : j; }

unsigned min_inexact_order(const std::vector<Jet>& ys) {
  unsigned o = ~0u;
  for (const auto& y : ys)
    if (!y.exact()) o = std::min(o, y.order());
  return o;
}

// One Taylor term T·y^k of an equation, k a multi-index over the unknowns.
struct TaylorTerm {
  std::vector<unsigned> k;
  unsigned total = 0;
  Jet coeff;
};

unsigned y_degree(const Jet& f) {
  const VarContext& c = f.ctx();
  unsigned best = 0;
  for (const auto& [m, _] : f.terms()) {
    unsigned d = 0;
    for (std::size_t i = 0; i < c.y_count(); ++i) d += m.exponent(c.y_index(i));
    best = std::max(best, d);
  }
  return best;
}

std::vector<TaylorTerm> taylor_terms(const Jet& f, const std::vector<Jet>& y_at) {
  const VarContext& c = f.ctx();
  const std::size_t n = c.y_count();
  const unsigned deg = y_degree(f);
  std::vector<TaylorTerm> out;
  std::vector<unsigned> k(n, 0);
  // Derivatives are taken incrementally along the multi-index recursion.
  auto rec = [&](auto&& self, std::size_t var, const Jet& deriv, unsigned total, const Rational& fact) -> void {
    if (var == n) {
      if (total >= 2 && !deriv.is_zero()) {
        Jet value = substitute(deriv, y_at).scaled(Rational(1) / fact);
        if (!value.is_zero()) out.push_back({k, total, value});
      }
      return;
    }
    Jet d = deriv;
    Rational f_acc = fact;
    for (unsigned p = 0; total + p <= deg; ++p) {
      if (p > 0) {
        d = partial_derivative(d, c.y_index(var));
        f_acc *= p;
        if (d.is_zero()) break;
      }
      k[var] = p;
      self(self, var + 1, d, total + p, f_acc);
    }
    k[var] = 0;
  };
  rec(rec, 0, f, 0, Rational(1));
  return out;
}

std::vector<Jet> mat_vec(const Matrix& M, const std::vector<Jet>& z, unsigned cap) {
  std::vector<Jet> out;
  for (const auto& row : M) {
    Jet acc = mul_tracked(row[0], z[0], cap);
    for (std::size_t j = 1; j < row.size(); ++j) acc += mul_tracked(row[j], z[j], cap);
    out.push_back(truncate(acc, cap));
  }
  return out;
}

bool same_vector(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

std::string describe(const Monomial& m, const VarContext& ctx) { return to_expr(m, ctx); }

LiftResult run_core(const PolySystem& sys, std::vector<Jet> y, const MonomialIdeal& ideal, unsigned target,
                    const MultiplierFn& make_multiplier) {
  const ContextPtr& ctx = sys.context();
  const std::size_t s = sys.equation_count(), n = sys.unknown_count();
  if (y.size() != n) throw Error(Errc::InvalidInput, "expected " + std::to_string(n) + " starting jets");
  for (const auto& v : y) require_same_context(v.context(), ctx, "lift start");
  require_same_context(ideal.context(), ctx, "lift residual ideal");
  if (ideal.is_unit()) throw Error(Errc::InvalidInput, "the residual ideal must be proper");

  const bool has_t = ctx->t_var().has_value();
  const std::size_t t_idx = has_t ? *ctx->t_index() : 0;

  auto prepare = [&](const std::vector<Jet>& ys) {
    JacobianData jd = jacobian_y(sys, ys);
    return std::make_pair(jd, make_multiplier(jd));
  };

  auto [jd, mult] = prepare(y);
  if (mult.h.is_zero())
    throw Error(Errc::HZero, s > n ? "h vanishes identically since s > n" : "h vanishes at the known order");
  const unsigned e = mult.h.ord().value();
  const unsigned working = target + 2 * e;

  auto residual = evaluate(sys, y);
  for (std::size_t i = 0; i < s; ++i) {
    auto mem = contains_jet(ideal, residual[i]);
    if (!mem)
      throw Error(Errc::ResidualNotInIdeal,
                  "equation " + std::to_string(i) + ": monomial " + describe(*mem.offending, *ctx));
  }

  const bool h_moves_with_t = has_t && mult.h.depends_on(t_idx);
  auto divisibility_failure = [&](const Monomial& q) {
    if (h_moves_with_t)
      throw Error(Errc::HDegeneratesAlongT, "h^2 does not divide " + describe(q, *ctx) + " uniformly in t");
    throw Error(Errc::ContractionViolated, "h^2 does not divide " + describe(q, *ctx));
  };
  {
    Jet h2 = mult.h * mult.h;
    for (const auto& q : ideal.generators()) {
      if (q.degree() < 2 * e + 1)
        throw Error(Errc::ContractionViolated, "generator " + describe(q, *ctx) + " has order " +
                                                   std::to_string(q.degree()) + " < 2*ord(h)+1 = " +
                                                   std::to_string(2 * e + 1));
      if (h2.order() < 2 * e) continue;
      try {
        divide_exact(Jet::monomial(ctx, q), h2, std::min(target, h2.order() - 2 * e));
      } catch (const Error& err) {
        if (err.code() != Errc::NotDivisible) throw;
        divisibility_failure(q);
      }
    }
  }

  if (min_inexact_order(y) < working)
    throw Error(Errc::OrderBudgetExceeded, "starting jets known to order " + std::to_string(min_inexact_order(y)) +
                                               ", need " + std::to_string(working) + " = target " +
                                               std::to_string(target) + " + 2*ord(h)");
  if (min_inexact_order(y) != ~0u) {
    for (auto& v : y) v = truncate(v, working);
    std::tie(jd, mult) = prepare(y);
    residual = evaluate(sys, y);
  }

  LiftResult out;
  out.h = mult.h;
  out.h_order = e;
  out.working_order = working;
  out.target_order = target;

  // c = F(y)/h² through the membership certificate.
  Jet h2 = mul_tracked(mult.h, mult.h, working);
  for (const auto& q : ideal.generators()) {
    Jet cq;
    try {
      cq = divide_exact(Jet::monomial(ctx, q), h2, target);
    } catch (const Error& err) {
      if (err.code() != Errc::NotDivisible) throw;
      divisibility_failure(q);
    }
    out.quotients.push_back({q, cq});
  }
  std::vector<Jet> c;
  for (std::size_t i = 0; i < s; ++i) {
    auto mem = contains_jet(ideal, residual[i]);
    Jet acc = Jet::zero(ctx, target).inexact();
    for (std::size_t a = 0; a < mem.certificate->generators.size(); ++a)
      acc += mul_tracked(mem.certificate->cofactors[a], out.quotients[a].quotient, target);
    c.push_back(truncate(acc, target));
    out.start_certificates.push_back(std::move(*mem.certificate));
  }

  std::vector<std::vector<TaylorTerm>> taylor;
  unsigned max_total = 2;
  for (const auto& f : sys.equations()) {
    taylor.push_back(taylor_terms(f, y));
    for (const auto& t : taylor.back()) max_total = std::max(max_total, t.total);
  }
  std::vector<Jet> h_pow{Jet::constant(ctx, 1, working)};
  for (unsigned p = 1; p + 2 <= max_total; ++p) h_pow.push_back(truncate(mul_tracked(h_pow.back(), mult.h, working), working));

  // z ↦ -c - Σ h^{|k|-2}·T_k·(M z)^k
  auto step = [&](const std::vector<Jet>& z) {
    std::vector<Jet> w = mat_vec(mult.M, z, target);
    std::vector<Jet> next;
    for (std::size_t i = 0; i < s; ++i) {
      Jet acc = -c[i];
      for (const auto& term : taylor[i]) {
        Jet prod = mul_tracked(term.coeff, h_pow[term.total - 2], target);
        for (std::size_t j = 0; j < n; ++j)
          for (unsigned p = 0; p < term.k[j]; ++p) prod = mul_tracked(prod, w[j], target);
        acc -= prod;
      }
      next.push_back(truncate(acc, target));
    }
    return next;
  };

  std::vector<Jet> z;
  for (const auto& ci : c) z.push_back(-ci);
  out.trace.push_back({z, Valuation::infinity()});
  bool converged = false;
  for (unsigned it = 0; it < target + 2; ++it) {
    std::vector<Jet> next = step(z);
    Valuation change = Valuation::infinity();
    for (std::size_t i = 0; i < s; ++i) change = std::min(change, (next[i] - z[i]).ord());
    out.trace.push_back({next, change});
    if (same_vector(next, z)) {
      converged = true;
      break;
    }
    z = std::move(next);
  }
  if (!converged) throw Error(Errc::NoConvergence, "iteration cap " + std::to_string(target + 2) + " reached");

  std::vector<Jet> w = mat_vec(mult.M, z, target);
  for (std::size_t j = 0; j < n; ++j) {
    Jet dy = truncate(mul_tracked(mult.h, w[j], target), target);
    out.delta_y.push_back(dy);
    out.y_solution.push_back(truncate(truncate(y[j], target) + dy, target));
  }

  out.residuals = evaluate(sys, out.y_solution);
  for (std::size_t i = 0; i < s; ++i)
    if (!out.residuals[i].is_zero())
      throw Error(Errc::NoConvergence, "residual of equation " + std::to_string(i) + " did not vanish");

  std::vector<Monomial> support;
  for (const auto& qw : out.quotients)
    for (const auto& [m, _] : qw.quotient.terms()) support.push_back(x_part(*ctx, m));
  out.correction_ideal = MonomialIdeal(ctx, std::move(support));
  for (const auto& dy : out.delta_y) {
    auto mem = contains_jet(out.correction_ideal, dy);
    if (!mem) throw Error(Errc::NoConvergence, "correction left the ideal h^-2·a");
    out.correction_certificates.push_back(std::move(*mem.certificate));
  }
  return out;
}

Multiplier adjugate_multiplier(const JacobianData& jd) {
  return {jd.h, multiply(transpose(jd.jacobian), jd.adjugate)};
}

Jet project(const Jet& j, const ContextPtr& ctx) { return embed(j, ctx); }

}  // namespace

LiftResult tougeron_step(const LiftRequest& req) {
  if (!req.sys.quotient() || req.sys.quotient()->is_zero())
    return run_core(req.sys, req.y_start, req.residual_ideal, req.target_order, adjugate_multiplier);

  // Lift the unfolded system and read the original unknowns back.
  PolySystem unfolded = quotient_unfold(req.sys);
  const ContextPtr& uctx = unfolded.context();
  std::vector<Jet> start;
  for (const auto& y : req.y_start) start.push_back(embed(y, uctx));
  while (start.size() < unfolded.unknown_count()) start.push_back(Jet::zero(uctx));
  LiftResult r = run_core(unfolded, start, embed(req.residual_ideal, uctx), req.target_order, adjugate_multiplier);

  const ContextPtr& ctx = req.sys.context();
  const std::size_t n = req.sys.unknown_count();
  LiftResult out;
  out.h = project(r.h, ctx);
  out.h_order = r.h_order;
  out.working_order = r.working_order;
  out.target_order = r.target_order;
  for (std::size_t j = 0; j < n; ++j) {
    out.y_solution.push_back(project(r.y_solution[j], ctx));
    out.delta_y.push_back(project(r.delta_y[j], ctx));
  }
  out.trace = std::move(r.trace);
  for (auto& rec : out.trace)
    for (auto& z : rec.z) z = project(z, ctx);
  out.residuals = evaluate(req.sys, out.y_solution);
  for (const auto& res : out.residuals)
    if (!res.is_zero()) throw Error(Errc::NoConvergence, "residual does not vanish modulo the quotient");
  for (const auto& res : evaluate(req.sys, req.y_start))
    out.start_certificates.push_back(*contains_jet(req.residual_ideal, res).certificate);
  out.correction_ideal = embed(r.correction_ideal, ctx);
  for (const auto& qw : r.quotients)
    out.quotients.push_back({embed(Jet::monomial(uctx, qw.generator), ctx).terms().begin()->first,
                             project(qw.quotient, ctx)});
  for (const auto& dy : out.delta_y) out.correction_certificates.push_back(*contains_jet(out.correction_ideal, dy).certificate);
  return out;
}

LiftResult ann_coker_step(const LiftRequest& req, const Jet& h_tilde, const Matrix& B) {
  if (req.sys.quotient() && !req.sys.quotient()->is_zero())
    throw Error(Errc::InvalidInput, "unfold the quotient before supplying a multiplier certificate");
  const std::size_t s = req.sys.equation_count(), n = req.sys.unknown_count();
  if (B.size() != n || std::any_of(B.begin(), B.end(), [&](const auto& r) { return r.size() != s; }))
    throw Error(Errc::CertificateInvalid, "B must be " + std::to_string(n) + "x" + std::to_string(s));
  require_same_context(h_tilde.context(), req.sys.context(), "multiplier");
  for (const auto& row : B)
    for (const auto& b : row) require_same_context(b.context(), req.sys.context(), "multiplier matrix");
  auto make = [&](const JacobianData& jd) {
    if (!matrices_equal(multiply(jd.jacobian, B), scaled_identity(h_tilde, s)))
      throw Error(Errc::CertificateInvalid, "J*B differs from h_tilde*Id");
    return Multiplier{h_tilde, B};
  };
  return run_core(req.sys, req.y_start, req.residual_ideal, req.target_order, make);
}

std::vector<std::string> shifted_unknown_names(const VarContext& ctx, std::size_t generator_count) {
  std::string sep = "_";
  auto build = [&] {
    std::vector<std::string> out;
    for (const auto& y : ctx.y_vars())
      for (std::size_t a = 0; a < generator_count; ++a) out.push_back(y + sep + std::to_string(a + 1));
    return out;
  };
  for (;;) {
    auto names = build();
    if (std::none_of(names.begin(), names.end(), [&](const std::string& nm) { return ctx.index_of(nm).has_value(); }))
      return names;
    sep += "_";
  }
}

GeneralLiftResult lift_general_filtration(const PolySystem& sys, const std::vector<Jet>& prefix, const Filtration& A,
                                          unsigned N, unsigned oracle_order) {
  if (sys.quotient() && !sys.quotient()->is_zero())
    throw Error(Errc::InvalidInput, "general filtration lifts take systems without a quotient");
  const ContextPtr& ctx = sys.context();
  const std::size_t n = sys.unknown_count();
  if (prefix.size() != n) throw Error(Errc::InvalidInput, "expected " + std::to_string(n) + " prefix jets");
  require_same_context(A.context(), ctx, "filtration");

  std::vector<Jet> P;
  for (const auto& p : prefix) {
    require_same_context(p.context(), ctx, "prefix");
    P.push_back(Jet::polynomial(ctx, p.terms()));
  }

  FGCertificate fg = weak_fg_check(A, N + 1, 0);
  const MonomialIdeal& target_ideal = A.ideal_at(N + 1);

  std::vector<MembershipCertificate> prefix_certs;
  auto residual = evaluate(sys, P);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    auto mem = contains_jet(target_ideal, residual[i]);
    if (!mem)
      throw Error(Errc::PrefixNotApproximate, "residual of equation " + std::to_string(i) + " has monomial " +
                                                  describe(*mem.offending, *ctx) + " outside A_" +
                                                  std::to_string(N + 1));
    prefix_certs.push_back(std::move(*mem.certificate));
  }

  // G(ỹ) = F(prefix + Σ q_α·ỹ_α)
  const std::size_t k = fg.q_set.size();
  auto names = shifted_unknown_names(*ctx, k);
  auto gctx = make_context(ctx->x_vars(), names, ctx->t_var());
  std::vector<Jet> images;
  for (std::size_t i = 0; i < ctx->x_count(); ++i) images.push_back(Jet::variable(gctx, ctx->name(i)));
  for (std::size_t j = 0; j < n; ++j) {
    Jet img = embed(P[j], gctx);
    for (std::size_t a = 0; a < k; ++a)
      img += Jet::monomial(gctx, embed(Jet::monomial(ctx, fg.q_set[a]), gctx).terms().begin()->first.times(
                                     Monomial::variable(*gctx, *gctx->index_of(names[j * k + a]))));
    images.push_back(img);
  }
  if (ctx->t_var()) images.push_back(Jet::variable(gctx, *ctx->t_var(), 0));
  std::vector<Jet> geqs;
  for (const auto& f : sys.equations()) geqs.push_back(Jet::polynomial(gctx, compose(f, gctx, images).terms()));

  // The adic lift from the prefix, with the residual ideal scaled by the
  // lowest monomial of h² so that the correction stays inside A_{N+1}.
  JacobianData jd = jacobian_y(sys, P);
  if (jd.h.is_zero()) throw Error(Errc::HZero, "h vanishes at the prefix");
  Jet h2 = jd.h * jd.h;
  MonomialIdeal lead(ctx, {x_part(*ctx, h2.terms().begin()->first)});
  LiftRequest req{sys, P, product(target_ideal, lead), oracle_order};

  GeneralLiftResult out{fg, std::move(prefix_certs), PolySystem(gctx, std::move(geqs)), {}, {}, tougeron_step(req), {}};

  std::vector<Jet> shifted(n * k);
  for (std::size_t j = 0; j < n; ++j) {
    Jet diff = out.lift.y_solution[j] - P[j].at_order(oracle_order);
    auto mem = contains_jet(target_ideal, diff);
    if (!mem)
      throw Error(Errc::NotDivisible, "correction of " + ctx->y_vars()[j] + " leaves A_" + std::to_string(N + 1) +
                                          " at monomial " + describe(*mem.offending, *ctx));
    for (std::size_t a = 0; a < k; ++a) shifted[j * k + a] = embed(mem.certificate->cofactors[a], gctx);
    out.approximation_certificates.push_back(std::move(*mem.certificate));
  }
  out.shifted_solution = shifted;
  if (k > 0) {
    out.shifted_residuals = evaluate(out.shifted, out.shifted_solution);
    for (const auto& r : out.shifted_residuals)
      if (!r.is_zero()) throw Error(Errc::NoConvergence, "shifted system not solved by the pulled-back correction");
  }
  return out;
}

}  // namespace filtap
