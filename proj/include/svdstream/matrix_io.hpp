#pragma once

#include <iosfwd>
#include <string>

#include "svdstream/linalg.hpp"

namespace svdstream {

inline constexpr const char* kMatrixMagic = "svdstream-matrix";
inline constexpr const char* kMatrixVersion = "v1";

/// Text format: "svdstream-matrix v1 <rows> <cols>" then rows*cols values row-major,
/// one row per line, 17 significant digits.
void write_matrix(std::ostream& os, const DenseMatrix& m);
void write_matrix(const std::string& path, const DenseMatrix& m);

/// Throws ParseError on a malformed header or body, IoError if the file can't be read.
DenseMatrix read_matrix(std::istream& is);
DenseMatrix read_matrix(const std::string& path);

/// A matrix file holding a single row or column, flattened. Throws ParseError otherwise.
Vector read_vector(const std::string& path);

}  // namespace svdstream
