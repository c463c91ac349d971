#pragma once

#include "svdstream/linalg.hpp"

namespace svdstream {

/// Eigenvalues ascending and eigenvectors as columns.
struct SymEigen {
  Vector values;
  DenseMatrix vectors;
};

/// Cyclic Jacobi eigensolver for a dense symmetric matrix. Slow and accurate; used as
/// the reference the fast paths are checked against. Throws NonSquare, NonSymmetric,
/// NonFinite, NoConvergence.
SymEigen jacobi_eigen(const DenseMatrix& s);

/// One-sided (Hestenes) Jacobi SVD of any m x n matrix. Singular vectors belonging to
/// zero singular values are completed to an orthonormal basis. Throws NonFinite,
/// EmptyInput, NoConvergence.
SVDFactors jacobi_svd(const DenseMatrix& a);

/// Largest singular value by power iteration on A^T A, stopped when the Rayleigh
/// quotient changes by at most 1e-12 relative. Returns 0 for the zero matrix.
double largest_singular_value(const DenseMatrix& a);

}  // namespace svdstream
