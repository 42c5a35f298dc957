#include "lls/error.hpp"

namespace lls {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateMse: return "DegenerateMse";
    case ErrorKind::MissingData: return "MissingData";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InconsistentSigma: return "InconsistentSigma";
    case ErrorKind::ScaleExceeded: return "ScaleExceeded";
    case ErrorKind::FdStepUnstable: return "FdStepUnstable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient:
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::DegenerateMse:
    case ErrorKind::InconsistentSigma:
    case ErrorKind::FdStepUnstable:
      return true;
    default:
      return false;
  }
}

}  // namespace lls
