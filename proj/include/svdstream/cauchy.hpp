#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "svdstream/linalg.hpp"

namespace svdstream {

enum class Backend { Naive, Fast, Fmm };

std::string_view to_string(Backend b);
/// Parses "naive" | "fast" | "fmm"; throws InvalidArgument otherwise.
Backend parse_backend(std::string_view name);

/// Which Cauchy matrix-vector product implementation to use.
struct BackendChoice {
  Backend kind = Backend::Fmm;
  double epsilon = 1.0 / 95367431640625.0;  // 5^-20, i.e. p = 20
  std::size_t threads = 1;                  // row parallelism; results do not depend on it

  static BackendChoice naive() { return {Backend::Naive}; }
  static BackendChoice fast() { return {Backend::Fast}; }
  static BackendChoice fmm(double eps = 1.0 / 95367431640625.0) { return {Backend::Fmm, eps}; }
};

/// Structure of C~ = diag(abar) * C * diag(col_norms)^-1 with C_ij = 1/(lambda_i - mu_j).
struct CauchySystem {
  Vector lambda;     // poles (old eigenvalues)
  Vector mu;         // nodes (new eigenvalues)
  Vector abar;       // left scaling
  Vector col_norms;  // Euclidean norms of the columns of diag(abar) * C

  std::size_t size() const noexcept { return lambda.size(); }
};

/// Explicit C_ij = 1/(lambda_i - mu_j). For tests and oracles only.
DenseMatrix build_cauchy(std::span<const double> lambda, std::span<const double> mu);

/// out[i] = sum_j u_j / (lambda_j - mu_i), by direct double loop.
Vector cauchy_matvec_naive(std::span<const double> lambda, std::span<const double> mu,
                           std::span<const double> u);

/// out[i] = sqrt(sum_j abar_j^2 / (lambda_j - mu_i)^2). Throws PoleCollision, ZeroColumn.
Vector column_norms(std::span<const double> abar, std::span<const double> lambda,
                    std::span<const double> mu);

/// U * C~, with the U * diag(abar) * C product delegated to `backend` one row at a
/// time. Each output column is flipped so its largest-magnitude entry is positive.
DenseMatrix apply_ctilde(const CauchySystem& sys, const DenseMatrix& U,
                         const BackendChoice& backend);

/// Throws PoleCollision if some |lambda_j - mu_i| is below the machine spacing.
void check_pole_separation(std::span<const double> lambda, std::span<const double> mu);

}  // namespace svdstream
