#include "svdstream/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svdstream/errors.hpp"

namespace svdstream {
namespace {

constexpr int kMaxSweeps = 100;

void require_finite(const DenseMatrix& a, const char* what) {
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, what);
}

// Columns of `q` (rows x filled) are orthonormal; appends unit vectors until
// the basis is square, each orthogonalized twice against everything before it.
void complete_basis(DenseMatrix& q, std::size_t filled) {
  const std::size_t n = q.rows();
  std::vector<bool> used(n, false);
  for (std::size_t k = filled; k < n; ++k) {
    Vector best;
    double best_norm = -1.0;
    std::size_t best_e = 0;
    for (std::size_t e = 0; e < n; ++e) {
      if (used[e]) continue;
      Vector v(n, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) {
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * v[i];
          for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, j);
        }
      }
      const double nv = norm2(v);
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
        best_e = e;
      }
      if (best_norm > 0.5) break;
    }
    used[best_e] = true;
    for (double& x : best) x /= best_norm;
    q.set_column(k, best);
  }
}

// One-sided Jacobi on the columns of b (r x c). On return the columns of b are
// mutually orthogonal and b_in * j = b.
void hestenes(DenseMatrix& b, DenseMatrix& j) {
  const std::size_t r = b.rows();
  const std::size_t c = b.cols();
  j = DenseMatrix::identity(c);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < c; ++p) {
      for (std::size_t q = p + 1; q < c; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
          alpha += b(i, p) * b(i, p);
          beta += b(i, q) * b(i, q);
          gamma += b(i, p) * b(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::hypot(1.0, t);
        const double sn = cs * t;
        for (std::size_t i = 0; i < r; ++i) {
          const double x = b(i, p);
          const double y = b(i, q);
          b(i, p) = cs * x - sn * y;
          b(i, q) = sn * x + cs * y;
        }
        for (std::size_t i = 0; i < c; ++i) {
          const double x = j(i, p);
          const double y = j(i, q);
          j(i, p) = cs * x - sn * y;
          j(i, q) = sn * x + cs * y;
        }
      }
    }
    if (!rotated) return;
  }
  throw Error(ErrorKind::NoConvergence, "one-sided Jacobi did not converge");
}

}  // namespace

SymEigen jacobi_eigen(const DenseMatrix& s) {
  if (!s.is_square()) throw Error(ErrorKind::NonSquare, "jacobi_eigen needs a square matrix");
  require_finite(s, "jacobi_eigen input");
  const std::size_t n = s.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double scale = std::max({std::abs(s(i, k)), std::abs(s(k, i)), 1e-300});
      if (std::abs(s(i, k) - s(k, i)) > 1e-12 * scale) {
        throw Error(ErrorKind::NonSymmetric, "jacobi_eigen input is not symmetric");
      }
    }
  }
  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::identity(n);
  bool done = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !done; ++sweep) {
    done = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        if (std::abs(apq) <= 1e-300 ||
            std::abs(apq) <= 1e-17 * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        done = false;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!done) throw Error(ErrorKind::NoConvergence, "Jacobi eigensolver did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymEigen out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.set_column(k, v.column(order[k]));
  }
  return out;
}

SVDFactors jacobi_svd(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) throw Error(ErrorKind::EmptyInput, "jacobi_svd of an empty matrix");
  require_finite(a, "jacobi_svd input");

  // Work on whichever of A, A^T has fewer columns: B J = W, W orthogonal columns.
  const bool wide = m <= n;
  DenseMatrix b = wide ? transpose(a) : a;
  DenseMatrix j;
  hestenes(b, j);
  const std::size_t k = b.cols();

  Vector sigma(k);
  for (std::size_t c = 0; c < k; ++c) sigma[c] = norm2(b.column(c));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = k ? sigma[order[0]] : 0.0;
  const double cutoff = smax * 1e-15 * static_cast<double>(std::max(m, n));
  DenseMatrix small(k, k);  // J reordered
  DenseMatrix big(b.rows(), b.rows());
  Vector s(k);
  std::size_t filled = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t src = order[c];
    s[c] = sigma[src];
    small.set_column(c, j.column(src));
    if (sigma[src] > cutoff && sigma[src] > 0.0) {
      Vector w = b.column(src);
      for (double& x : w) x /= sigma[src];
      big.set_column(c, w);
      filled = c + 1;
    }
  }
  // Zero singular values sort last, so the computed columns form a prefix.
  for (std::size_t c = filled; c < k; ++c) s[c] = sigma[order[c]];
  complete_basis(big, filled);

  SVDFactors out;
  out.S = DiagRect(m, n, s);
  if (wide) {
    out.U = std::move(small);
    out.V = std::move(big);
  } else {
    out.U = std::move(big);
    out.V = std::move(small);
  }
  return out;
}

double largest_singular_value(const DenseMatrix& a) {
  require_finite(a, "largest_singular_value input");
  const std::size_t n = a.cols();
  if (a.rows() == 0 || n == 0 || a.max_abs() == 0.0) return 0.0;
  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = 1.0 + 0.5 * std::sin(static_cast<double>(j) + 1.0);
  double nx = norm2(x);
  for (double& v : x) v /= nx;
  double rq = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Vector ax = matvec(a, x);
    const double next = dot(ax, ax);
    Vector y = matvec_t(a, ax);
    const double ny = norm2(y);
    if (ny == 0.0) return std::sqrt(next);
    for (std::size_t j = 0; j < n; ++j) x[j] = y[j] / ny;
    if (it > 0 && std::abs(next - rq) <= 1e-12 * next) {
      rq = next;
      break;
    }
    rq = next;
  }
  // Rayleigh quotient at the final iterate.
  const Vector ax = matvec(a, x);
  return std::sqrt(std::max(rq, dot(ax, ax)));
}

}  // namespace svdstream
