#include "filtap/homotopy.hpp"

#include "filtap/error.hpp"
#include "filtap/expr.hpp"

namespace filtap {

namespace {

bool agree(const Jet& a, const Jet& b) { return agree_to_order(a, b, std::min(a.order(), b.order())); }

}  // namespace

HomotopyReport verify_homotopy(const PolySystem& sys, const SolutionFamily& fam, const std::vector<Jet>& y0,
                               const std::vector<Jet>& y1) {
  const ContextPtr& ctx = sys.context();
  if (!ctx->t_var()) throw Error(Errc::InvalidInput, "homotopies need a t variable");
  const std::size_t n = sys.unknown_count();
  if (fam.family.size() != n || y0.size() != n || y1.size() != n)
    throw Error(Errc::InvalidInput, "expected " + std::to_string(n) + " jets per solution");
  for (const auto* v : {&fam.family, &y0, &y1})
    for (const auto& j : *v) require_same_context(j.context(), ctx, "homotopy");
  require_same_context(fam.ideal.context(), ctx, "homotopy ideal");
  const std::size_t t = *ctx->t_index();

  HomotopyReport rep;
  rep.endpoints = true;
  for (std::size_t j = 0; j < n && rep.endpoints; ++j) {
    for (int end = 0; end <= 1; ++end) {
      Jet at = specialize(fam.family[j], t, end);
      const Jet& want = end ? y1[j] : y0[j];
      if (!agree(at, want)) {
        rep.endpoints = false;
        rep.endpoint_witness = ctx->y_vars()[j] + " at t=" + std::to_string(end) + " is " + to_expr(at) +
                               ", expected " + to_expr(want);
        break;
      }
    }
  }

  rep.solves = true;
  auto residuals = evaluate(sys, fam.family);
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (!residuals[i].is_zero()) {
      rep.solves = false;
      rep.residual_witness = "equation " + std::to_string(i) + " leaves " + to_expr(residuals[i]);
      break;
    }

  rep.stays_in_ideal = true;
  for (std::size_t j = 0; j < n; ++j) {
    auto mem = contains_jet(fam.ideal, fam.family[j] - y0[j]);
    if (!mem) {
      rep.stays_in_ideal = false;
      rep.membership_witness = ctx->y_vars()[j] + " moves by monomial " + to_expr(*mem.offending, *ctx) +
                               " outside the ideal";
      rep.certificates.clear();
      break;
    }
    rep.certificates.push_back(std::move(*mem.certificate));
  }
  return rep;
}

SolutionFamily parametric_lift(const LiftRequest& req, const SolutionFamily& family_start) {
  if (!req.sys.context()->t_var()) throw Error(Errc::InvalidInput, "parametric lifts need a t variable");
  LiftRequest r = req;
  r.y_start = family_start.family;
  LiftResult res = tougeron_step(r);
  MonomialIdeal ideal = res.correction_ideal;
  if (family_start.ideal.context()) ideal = sum(ideal, family_start.ideal);
  return SolutionFamily{res.y_solution, ideal};
}

}  // namespace filtap
