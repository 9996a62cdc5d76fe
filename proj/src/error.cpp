#include "divscale/error.hpp"

namespace divscale {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionUnsupported: return "VersionUnsupported";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyPopulation: return "EmptyPopulation";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NegativeBound: return "NegativeBound";
    case ErrorKind::DegenerateRatio: return "DegenerateRatio";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::DegenerateConstant: return "DegenerateConstant";
    case ErrorKind::InvalidBase: return "InvalidBase";
    case ErrorKind::NonPositiveLogArgument: return "NonPositiveLogArgument";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::NonPositiveScore: return "NonPositiveScore";
    case ErrorKind::NoCommonPoints: return "NoCommonPoints";
    case ErrorKind::ConstantSeries: return "ConstantSeries";
  }
  return "Unknown";
}

}  // namespace divscale
