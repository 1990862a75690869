#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bet {

enum class ErrorCode {
  InvalidArgument,
  SyntaxError,
  UnknownIdentifier,
  DimensionMismatch,
  DomainError,
  SingularMetric,
  NonCompactDomain,
  NonpositiveDensity,
  FormMismatch,
  SchemaError,
  UnsupportedFiber,
  PoleProximity,
  HypothesisFailed,
  ModeMismatch,
  InvalidInterval,
  DomainExit,
  StepTooCoarse,
  ProfileTooShort,
  HypothesisNotMet,
  EmptyAnnulus,
  CutReached,
  UnsupportedQ,
  RequiresPositiveR,
  NotFound,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. The code is the stable, machine-readable part;
/// the message is for humans. Parse errors also carry a character offset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace bet
