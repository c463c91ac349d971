#include "svdstream/errors.hpp"

namespace svdstream {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::PoleCollision: return "PoleCollision";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DuplicateNode: return "DuplicateNode";
    case ErrorKind::InvalidOrder: return "InvalidOrder";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace svdstream
