#pragma once

#include <optional>
#include <vector>

#include "filtap/filtration.hpp"
#include "filtap/system.hpp"

namespace filtap {

struct LiftRequest {
  PolySystem sys;
  /// Approximate solution, one jet per y variable.
  std::vector<Jet> y_start;
  /// Ideal the starting residual must lie in.
  MonomialIdeal residual_ideal;
  unsigned target_order = 0;
};

/// One fixed-point iterate z_k and ord(z_k - z_{k-1}).
struct IterationRecord {
  std::vector<Jet> z;
  Valuation change;
};

/// q = h²·c_q, checked by re-multiplication.
struct QuotientWitness {
  Monomial generator;
  Jet quotient;
};

struct LiftResult {
  std::vector<Jet> y_solution;
  std::vector<Jet> delta_y;
  std::vector<IterationRecord> trace;

  /// The multiplier h (det(J·Jᵀ), or the user's h̃) and its order.
  Jet h;
  unsigned h_order = 0;
  unsigned working_order = 0;
  unsigned target_order = 0;

  /// F at y_solution, recomputed independently; all zero at target order.
  std::vector<Jet> residuals;
  /// Starting residual in the requested ideal.
  std::vector<MembershipCertificate> start_certificates;
  /// Ideal 𝔞′ with h²·𝔞′ ⊇ 𝔞, witnessed by `quotients`.
  MonomialIdeal correction_ideal;
  std::vector<QuotientWitness> quotients;
  /// delta_y ∈ 𝔞′ componentwise.
  std::vector<MembershipCertificate> correction_certificates;
};

/// Newton-type lift through Δy = h·Jᵀ·adj(J·Jᵀ)·z.
/// Errors, checked in this order: HZero, ResidualNotInIdeal,
/// ContractionViolated, OrderBudgetExceeded, NoConvergence.
/// A quotient on the system is unfolded first; the result is projected back.
LiftResult tougeron_step(const LiftRequest& req);

/// Same lift with a user-supplied multiplier: Δy = h̃·B·z where
/// J·B = h̃·Id must hold (CertificateInvalid otherwise).
LiftResult ann_coker_step(const LiftRequest& req, const Jet& h_tilde, const Matrix& B);

struct GeneralLiftResult {
  FGCertificate fg;
  /// Certificate that the prefix residual lies in A_{N+1}.
  std::vector<MembershipCertificate> prefix_certificates;
  /// Shifted system G(ỹ) = F(prefix + Σ q_α·ỹ_α).
  PolySystem shifted;
  /// Solution of the shifted system, ordered as its y variables.
  std::vector<Jet> shifted_solution;
  /// Residuals of G at shifted_solution (zero at their order).
  std::vector<Jet> shifted_residuals;
  LiftResult lift;
  /// y_solution - prefix ∈ A_{N+1}, per component.
  std::vector<MembershipCertificate> approximation_certificates;
};

/// Reduction of a general monomial filtration to the adic lift: the lift
/// runs with residual ideal A_{N+1}·(lowest monomial of h²), and the
/// correction is pulled back to the unknowns of the shifted system.
/// Errors: PrefixNotApproximate, plus those of tougeron_step.
GeneralLiftResult lift_general_filtration(const PolySystem& sys, const std::vector<Jet>& prefix, const Filtration& A,
                                          unsigned N, unsigned oracle_order);

/// Names of the shifted unknowns: one per (y variable, generator) pair.
std::vector<std::string> shifted_unknown_names(const VarContext& ctx, std::size_t generator_count);

}  // namespace filtap
