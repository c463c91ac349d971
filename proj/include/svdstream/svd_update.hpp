#pragma once

#include <cstdint>
#include <span>

#include "svdstream/cauchy.hpp"
#include "svdstream/linalg.hpp"

namespace svdstream {

/// Data shared by the left and right eigen-updates of A + a b^T.
struct UpdateIngredients {
  Vector b_tilde;  // U S V^T b, length m
  Vector a_tilde;  // V S^T U^T a, length n
  double beta = 0.0;   // b^T b
  double alpha = 0.0;  // a^T a
  Vector Du;  // sigma^2, length m
  Vector Dv;  // sigma^2 padded with n - m zeros
};

/// Monotonic-clock nanoseconds per phase, accumulated across calls.
struct PhaseTimes {
  std::int64_t prepare_ns = 0;  // ingredients and the two 2x2 Schur forms
  std::int64_t secular_ns = 0;  // sorting, deflation, root finding, column norms
  std::int64_t matvec_ns = 0;   // Cauchy products, normalization, reassembly
  std::int64_t total_ns = 0;
};

struct UpdateReport {
  double error = 0.0;
  double orth_u = 0.0;
  double orth_v = 0.0;
  double sigma_consistency = 0.0;
  bool negative_clamped = false;  // some left eigenvalue fell below -1e-8 * ||A_hat||^2
  PhaseTimes timings;
};

struct UpdateResult {
  SVDFactors factors;
  UpdateReport report;
};

/// U * D * U^T after a rank-one change, eigenvalues ascending.
struct SymEigenUpdate {
  DenseMatrix U;
  Vector D;
};

/// Throws DimensionMismatch, including for m > n.
UpdateIngredients prepare_update(const SVDFactors& svd, std::span<const double> a,
                                 std::span<const double> b);

/// Eigendecomposition of U diag(D) U^T + rho a1 a1^T. Deflated columns of U pass
/// through the Cauchy product untouched. rho = 0 or a1 = 0 returns the input as is.
/// Throws SingularInput on non-finite data and propagates solver/backend errors.
SymEigenUpdate rank_one_sym_update(const DenseMatrix& U, std::span<const double> D,
                                   std::span<const double> a1, double rho,
                                   const BackendChoice& backend, PhaseTimes* timings = nullptr);

/// SVD of A + a b^T from the SVD of A. A is rebuilt from the factors for sign
/// alignment and the report.
UpdateResult update_svd(const SVDFactors& svd, std::span<const double> a,
                        std::span<const double> b, const BackendChoice& backend);
/// Same, with A supplied by the caller.
UpdateResult update_svd(const DenseMatrix& A, const SVDFactors& svd, std::span<const double> a,
                        std::span<const double> b, const BackendChoice& backend);

/// Flips v_i wherever u_i^T A_hat v_i < 0 for a singular value above round-off.
/// Returns the number of flipped columns.
std::size_t align_signs(SVDFactors& factors, const DenseMatrix& A_hat);

/// U * S * V^T.
DenseMatrix reconstruct(const SVDFactors& factors);

/// max |A_hat - U S V^T| / sigma_max(A_hat). Throws ZeroMatrix if A_hat = 0.
double reconstruction_error(const DenseMatrix& A_hat, const SVDFactors& factors);

}  // namespace svdstream
