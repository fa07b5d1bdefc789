#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsr {

enum class ErrorKind {
  DimensionMismatch,
  RankDeficient,
  NonPositiveEpsilon,
  EmptyInput,
  GammaOutOfRange,
  InitDimensionMismatch,
  AllPointsDegenerate,
  SingularIterate,
  NoValidCandidate,
  EmptyInliers,
  EmptyOutliers,
  MissingMask,
  DegenerateDenominator,
  InvalidSpec,
  ZeroPoint,
  IncompatibleGeometry,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported through this type;
/// callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rsr
