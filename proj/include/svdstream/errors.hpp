#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svdstream {

enum class ErrorKind {
  DimensionMismatch,
  NonSquare,
  NonSymmetric,
  NonFinite,
  PoleHit,
  PoleCollision,
  ZeroColumn,
  NoConvergence,
  DuplicateNode,
  InvalidOrder,
  EmptyInput,
  ZeroMatrix,
  SingularInput,
  InvalidArgument,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure class
/// and `what()` carries the details (offending indices, brackets, paths).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace svdstream
