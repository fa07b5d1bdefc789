#include "rsr/error.hpp"

namespace rsr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorKind::InitDimensionMismatch: return "InitDimensionMismatch";
    case ErrorKind::AllPointsDegenerate: return "AllPointsDegenerate";
    case ErrorKind::SingularIterate: return "SingularIterate";
    case ErrorKind::NoValidCandidate: return "NoValidCandidate";
    case ErrorKind::EmptyInliers: return "EmptyInliers";
    case ErrorKind::EmptyOutliers: return "EmptyOutliers";
    case ErrorKind::MissingMask: return "MissingMask";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ZeroPoint: return "ZeroPoint";
    case ErrorKind::IncompatibleGeometry: return "IncompatibleGeometry";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rsr
