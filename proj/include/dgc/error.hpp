#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgc {

enum class Errc {
  InvalidArgument,
  IndexOutOfRange,
  DuplicateEdge,
  NonPositiveWeight,
  SelfLoop,
  IsolatedNodeWithSymVariant,
  DimensionMismatch,
  UnstableStepSize,
  TooLargeForDenseOracle,
  NotSymmetric,
  OverflowRisk,
  EmptyMask,
  LabelOutOfRange,
  MissingFile,
  SchemaViolation,
  MaskOverlap,
  OracleLimitExceeded,
  Io,
};

std::string_view to_string(Errc code);

/// Exception type for every recoverable failure in the library. The code
/// lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dgc
