#pragma once

#include <optional>
#include <string>
#include <vector>

#include "filtap/lift.hpp"

namespace filtap {

/// Jets in (x, t), polynomial in t, together with the ideal (in x) the
/// family must stay inside relative to its start.
struct SolutionFamily {
  std::vector<Jet> family;
  MonomialIdeal ideal;
};

struct HomotopyReport {
  bool endpoints = false;
  bool solves = false;
  bool stays_in_ideal = false;
  /// First failure per check, human readable.
  std::optional<std::string> endpoint_witness;
  std::optional<std::string> residual_witness;
  std::optional<std::string> membership_witness;
  /// fam - y0 per component, with cofactors in (x, t).
  std::vector<MembershipCertificate> certificates;
  bool ok() const noexcept { return endpoints && solves && stays_in_ideal; }
};

/// Checks fam(t=0) = y0, fam(t=1) = y1, F(x, fam) = 0 identically in t and
/// fam - y0 ∈ ideal·(jets in x, t). The context must declare t.
HomotopyReport verify_homotopy(const PolySystem& sys, const SolutionFamily& fam, const std::vector<Jet>& y0,
                               const std::vector<Jet>& y1);

/// The lift run over jets in (x, t), with t a coefficient variable.
/// Errors: those of tougeron_step, HDegeneratesAlongT.
SolutionFamily parametric_lift(const LiftRequest& req, const SolutionFamily& family_start);

}  // namespace filtap
