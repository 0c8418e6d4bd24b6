#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace filtap {

enum class Errc {
  // input / plumbing
  SyntaxError,
  UnknownVariable,
  NegativeExponent,
  NotAMonomial,
  ContextMismatch,
  InvalidInput,
  Schema,
  Io,
  // jet
  IllFormedComposition,
  NotDivisible,
  InsufficientOrder,
  // ideal / filtration
  NotDescending,
  SearchExhausted,
  NotCofinal,
  // system
  SystemTooLarge,
  NoQuotient,
  // lift
  HZero,
  ResidualNotInIdeal,
  ContractionViolated,
  OrderBudgetExceeded,
  NoConvergence,
  CertificateInvalid,
  PrefixNotApproximate,
  HDegeneratesAlongT,
  NotAHomotopy,
  // borel
  WidthsTooLarge,
  GridTooCoarse,
  EpsilonSearchFailed,
  FlatBoundsViolated,
  DerivativeBoundsViolated,
  // verify
  CertificateMismatch,
};

std::string_view errc_name(Errc code);

/// True for outcomes that are mathematical refusals (a precondition of the
/// theory fails) rather than malformed input or budget violations.
bool is_refusal(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message, std::optional<std::size_t> position = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  Errc code_;
  std::optional<std::size_t> position_;
  std::string detail_;
};

}  // namespace filtap
