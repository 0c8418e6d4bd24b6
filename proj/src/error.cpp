#include "filtap/error.hpp"

namespace filtap {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::NegativeExponent: return "NegativeExponent";
    case Errc::NotAMonomial: return "NotAMonomial";
    case Errc::ContextMismatch: return "ContextMismatch";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::Schema: return "Schema";
    case Errc::Io: return "Io";
    case Errc::IllFormedComposition: return "IllFormedComposition";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::InsufficientOrder: return "InsufficientOrder";
    case Errc::NotDescending: return "NotDescending";
    case Errc::SearchExhausted: return "SearchExhausted";
    case Errc::NotCofinal: return "NotCofinal";
    case Errc::SystemTooLarge: return "SystemTooLarge";
    case Errc::NoQuotient: return "NoQuotient";
    case Errc::HZero: return "HZero";
    case Errc::ResidualNotInIdeal: return "ResidualNotInIdeal";
    case Errc::ContractionViolated: return "ContractionViolated";
    case Errc::OrderBudgetExceeded: return "OrderBudgetExceeded";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::CertificateInvalid: return "CertificateInvalid";
    case Errc::PrefixNotApproximate: return "PrefixNotApproximate";
    case Errc::HDegeneratesAlongT: return "HDegeneratesAlongT";
    case Errc::NotAHomotopy: return "NotAHomotopy";
    case Errc::WidthsTooLarge: return "WidthsTooLarge";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::EpsilonSearchFailed: return "EpsilonSearchFailed";
    case Errc::FlatBoundsViolated: return "FlatBoundsViolated";
    case Errc::DerivativeBoundsViolated: return "DerivativeBoundsViolated";
    case Errc::CertificateMismatch: return "CertificateMismatch";
  }
  return "Unknown";
}

bool is_refusal(Errc code) {
  switch (code) {
    case Errc::NotDivisible:
    case Errc::SearchExhausted:
    case Errc::NotCofinal:
    case Errc::HZero:
    case Errc::ResidualNotInIdeal:
    case Errc::ContractionViolated:
    case Errc::NoConvergence:
    case Errc::CertificateInvalid:
    case Errc::PrefixNotApproximate:
    case Errc::HDegeneratesAlongT:
    case Errc::NotAHomotopy:
    case Errc::EpsilonSearchFailed:
    case Errc::FlatBoundsViolated:
    case Errc::DerivativeBoundsViolated:
      return true;
    default:
      return false;
  }
}

namespace {
std::string compose(Errc code, const std::string& message, std::optional<std::size_t> position) {
  std::string out(errc_name(code));
  if (position) out += " at position " + std::to_string(*position);
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(Errc code, std::string message, std::optional<std::size_t> position)
    : std::runtime_error(compose(code, message, position)),
      code_(code),
      position_(position),
      detail_(std::move(message)) {}

}  // namespace filtap
