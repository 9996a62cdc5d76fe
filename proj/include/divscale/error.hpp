#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divscale {

enum class ErrorKind {
  BadMagic,
  VersionUnsupported,
  ShapeMismatch,
  NonFinite,
  IoFailure,
  ParseError,
  DuplicateKey,
  InvalidArgument,
  EmptyPopulation,
  ZeroVector,
  NegativeBound,
  DegenerateRatio,
  DegenerateFit,
  DegenerateConstant,
  InvalidBase,
  NonPositiveLogArgument,
  InsufficientPoints,
  NonPositiveScore,
  NoCommonPoints,
  ConstantSeries,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported as an Error carrying its kind, so
// callers (and the CLI) can map it to a stable name without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace divscale
