#include "bet/error.hpp"

namespace bet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::NonCompactDomain: return "NonCompactDomain";
    case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorCode::FormMismatch: return "FormMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnsupportedFiber: return "UnsupportedFiber";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::DomainExit: return "DomainExit";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::ProfileTooShort: return "ProfileTooShort";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::EmptyAnnulus: return "EmptyAnnulus";
    case ErrorCode::CutReached: return "CutReached";
    case ErrorCode::UnsupportedQ: return "UnsupportedQ";
    case ErrorCode::RequiresPositiveR: return "RequiresPositiveR";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> position)
    : std::runtime_error(decorate(code, message)), code_(code), position_(position) {}

}  // namespace bet
