#include "svdstream/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "svdstream/errors.hpp"

namespace svdstream {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch, "data length " + std::to_string(data_.size()) +
                                                  " != " + std::to_string(rows_) + "x" +
                                                  std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error(ErrorKind::DimensionMismatch, "ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw Error(ErrorKind::DimensionMismatch, "column length");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DiagRect::DiagRect(std::size_t r, std::size_t c, Vector d) : rows(r), cols(c), diag(std::move(d)) {
  if (diag.size() != std::min(r, c)) {
    throw Error(ErrorKind::DimensionMismatch, "DiagRect diagonal length");
  }
  for (double v : diag) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "singular values must be finite and nonnegative");
    }
  }
}

DenseMatrix DiagRect::dense() const {
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Schur2x2 schur_sym_2x2(const Sym2x2& m) {
  for (const auto& r : m) {
    for (double v : r) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "schur_sym_2x2 input");
    }
  }
  const double scale = std::max({std::abs(m[0][0]), std::abs(m[0][1]), std::abs(m[1][0]),
                                 std::abs(m[1][1])});
  if (std::abs(m[0][1] - m[1][0]) > 1e-14 * scale) {
    throw Error(ErrorKind::NonSymmetric, "off-diagonal entries differ");
  }
  const double a = m[0][0];
  const double b = 0.5 * (m[0][1] + m[1][0]);
  const double c = m[1][1];

  // Larger-magnitude root from the trace, the other from the determinant.
  const double half_tr = 0.5 * (a + c);
  const double h = std::hypot(0.5 * (a - c), b);
  const double det = a * c - b * b;
  double rho1 = 0.0;
  double rho2 = 0.0;
  if (half_tr >= 0.0) {
    rho1 = half_tr + h;
    rho2 = rho1 != 0.0 ? det / rho1 : half_tr - h;
  } else {
    rho2 = half_tr - h;
    rho1 = det / rho2;
  }

  // Eigenvector of rho1 from whichever row of (M - rho1 I) is better conditioned.
  double vx = b;
  double vy = rho1 - a;
  const double wx = rho1 - c;
  const double wy = b;
  if (std::hypot(wx, wy) > std::hypot(vx, vy)) {
    vx = wx;
    vy = wy;
  }
  const double nv = std::hypot(vx, vy);
  if (nv == 0.0) {
    vx = 1.0;
    vy = 0.0;
  } else {
    vx /= nv;
    vy /= nv;
  }
  if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
    vx = -vx;
    vy = -vy;
  }

  Schur2x2 out;
  out.rho1 = rho1;
  out.rho2 = rho2;
  out.Q = {{{vx, vy}, {vy, -vx}}};
  return out;
}

double orthogonality_defect(const DenseMatrix& m) {
  if (!m.is_square()) throw Error(ErrorKind::NonSquare, "orthogonality_defect");
  const std::size_t n = m.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m(k, i) * m(k, j);
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matmul");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorKind::DimensionMismatch, "matvec");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_t(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(ErrorKind::DimensionMismatch, "matvec_t");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

DenseMatrix select_columns(const DenseMatrix& a, std::span<const std::size_t> cols) {
  DenseMatrix out(a.rows(), cols.size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) out(i, k) = a(i, cols[k]);
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
  }
  return max_abs_diff(a.data(), b.data());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace svdstream
