#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "filtap/filtration.hpp"
#include "filtap/ideal.hpp"
#include "filtap/jet.hpp"

namespace filtap {

using Matrix = std::vector<std::vector<Jet>>;

/// s polynomial equations in (x, y[, t]), optionally over a quotient by a
/// monomial ideal in x. Note that h vanishes identically when s > n.
class PolySystem {
public:
  PolySystem(ContextPtr ctx, std::vector<Jet> equations, std::optional<MonomialIdeal> quotient = std::nullopt);

  const ContextPtr& context() const noexcept { return ctx_; }
  const std::vector<Jet>& equations() const noexcept { return eqs_; }
  const std::optional<MonomialIdeal>& quotient() const noexcept { return quotient_; }
  std::size_t equation_count() const noexcept { return eqs_.size(); }
  std::size_t unknown_count() const noexcept { return ctx_->y_count(); }

private:
  ContextPtr ctx_;
  std::vector<Jet> eqs_;
  std::optional<MonomialIdeal> quotient_;
};

/// F(x, y_assign), reduced modulo the quotient if there is one.
std::vector<Jet> evaluate(const PolySystem& sys, std::span<const Jet> y_assign);

Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);
/// Laplace expansion; square matrices up to 4x4 (SystemTooLarge beyond).
Jet determinant(const Matrix& m);
/// Transposed cofactor matrix, so m·adjugate(m) = det(m)·Id.
Matrix adjugate(const Matrix& m);
Matrix scaled_identity(const Jet& diagonal, std::size_t size);
bool matrices_equal(const Matrix& a, const Matrix& b);

struct JacobianData {
  Matrix jacobian;  // s×n, ∂F/∂y along y_assign
  Matrix gram;      // J·Jᵀ
  Jet h;            // det(J·Jᵀ)
  Matrix adjugate;  // adj(J·Jᵀ)
};

/// Errors: SystemTooLarge (s > 4), ContextMismatch.
JacobianData jacobian_y(const PolySystem& sys, std::span<const Jet> y_assign);

struct FormalCheck {
  std::vector<MembershipCertificate> certificates;
  std::optional<std::size_t> failed_equation;
  std::optional<Monomial> offending;
  explicit operator bool() const noexcept { return !failed_equation.has_value(); }
};

/// Residual of every equation lies in I_N of the filtration.
FormalCheck formal_solution_check(const PolySystem& sys, std::span<const Jet> y_assign, const Filtration& filt,
                                  unsigned N);

/// Replaces the quotient by new unknowns: F_i - Σ_α q_α·z_{i,α}. The new
/// unknowns follow the original y variables in the returned context.
/// Errors: NoQuotient.
PolySystem quotient_unfold(const PolySystem& sys);

}  // namespace filtap
