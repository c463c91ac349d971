#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace svdstream {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Takes ownership of row-major `data`; throws DimensionMismatch on a size mismatch.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool all_finite() const;
  double max_abs() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Rectangular diagonal matrix (Sigma). Entries are finite and nonnegative.
struct DiagRect {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector diag;  // length min(rows, cols)

  DiagRect() = default;
  DiagRect(std::size_t r, std::size_t c, Vector d);

  DenseMatrix dense() const;
};

/// Full SVD A = U * S * V^T with singular values descending.
struct SVDFactors {
  DenseMatrix U;  // m x m
  DiagRect S;     // m x n
  DenseMatrix V;  // n x n
};

using Sym2x2 = std::array<std::array<double, 2>, 2>;

/// Q * diag(rho1, rho2) * Q^T with rho1 >= rho2.
struct Schur2x2 {
  Sym2x2 Q{};
  double rho1 = 0.0;
  double rho2 = 0.0;
};

/// Closed-form symmetric 2x2 eigendecomposition. Throws NonSymmetric / NonFinite.
Schur2x2 schur_sym_2x2(const Sym2x2& m);

/// max |M^T M - I| entrywise. Throws NonSquare.
double orthogonality_defect(const DenseMatrix& m);

// Small dense helpers shared by the update and test code.

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// A^T x
Vector matvec_t(const DenseMatrix& a, std::span<const double> x);
/// Columns of `a` selected by `cols`, in that order.
DenseMatrix select_columns(const DenseMatrix& a, std::span<const std::size_t> cols);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace svdstream
