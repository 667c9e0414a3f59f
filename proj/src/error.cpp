#include "dgc/error.hpp"

namespace dgc {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::IsolatedNodeWithSymVariant: return "IsolatedNodeWithSymVariant";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnstableStepSize: return "UnstableStepSize";
    case Errc::TooLargeForDenseOracle: return "TooLargeForDenseOracle";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::OverflowRisk: return "OverflowRisk";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::MissingFile: return "MissingFile";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::MaskOverlap: return "MaskOverlap";
    case Errc::OracleLimitExceeded: return "OracleLimitExceeded";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace dgc
