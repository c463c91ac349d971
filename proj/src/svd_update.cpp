#include "svdstream/svd_update.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "svdstream/errors.hpp"
#include "svdstream/oracle.hpp"
#include "svdstream/secular.hpp"

namespace svdstream {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_factors(const SVDFactors& svd, std::size_t a_len, std::size_t b_len) {
  const std::size_t m = svd.U.rows();
  const std::size_t n = svd.V.rows();
  if (!svd.U.is_square() || !svd.V.is_square() || svd.S.rows != m || svd.S.cols != n) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent SVD factors");
  }
  if (a_len != m || b_len != n) throw Error(ErrorKind::DimensionMismatch, "update vectors do not match A");
  if (m > n) throw Error(ErrorKind::DimensionMismatch, "updates need rows <= cols");
}

// Order of `values` by descending value, ties by index.
std::vector<std::size_t> descending(const Vector& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  return order;
}

DenseMatrix dense_from(const SVDFactors& svd) { return reconstruct(svd); }

}  // namespace

UpdateIngredients prepare_update(const SVDFactors& svd, std::span<const double> a,
                                 std::span<const double> b) {
  check_factors(svd, a.size(), b.size());
  const std::size_t m = svd.U.rows();
  const std::size_t n = svd.V.rows();
  const Vector& s = svd.S.diag;
  UpdateIngredients in;

  Vector vtb = matvec_t(svd.V, b);
  Vector t(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = s[i] * vtb[i];
  in.b_tilde = matvec(svd.U, t);

  Vector uta = matvec_t(svd.U, a);
  Vector r(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) r[i] = s[i] * uta[i];
  in.a_tilde = matvec(svd.V, r);

  in.beta = dot(b, b);
  in.alpha = dot(a, a);
  in.Du.resize(m);
  in.Dv.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) in.Du[i] = in.Dv[i] = s[i] * s[i];
  return in;
}

SymEigenUpdate rank_one_sym_update(const DenseMatrix& U, std::span<const double> D,
                                   std::span<const double> a1, double rho,
                                   const BackendChoice& backend, PhaseTimes* timings) {
  const std::size_t n = D.size();
  if (!U.is_square() || U.rows() != n || a1.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "rank_one_sym_update operand sizes");
  }
  if (!U.all_finite() || !all_finite(D) || !all_finite(a1) || !std::isfinite(rho)) {
    throw Error(ErrorKind::SingularInput, "non-finite data in rank-one update");
  }
  SymEigenUpdate out{U, Vector(D.begin(), D.end())};
  if (rho == 0.0 || all_zero(a1) || n == 0) return out;

  auto t0 = Clock::now();
  const Vector abar = matvec_t(U, a1);
  DeflationResult defl = deflate(SecularProblem{out.D, abar, rho});
  const DeflatedProblem& book = defl.bookkeeping;

  DenseMatrix Us(n, n);
  Vector ds(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = book.permutation[k];
    ds[k] = D[src];
    for (std::size_t r = 0; r < n; ++r) Us(r, k) = U(r, src);
  }
  for (const GivensRotation& g : book.rotations) {
    for (std::size_t r = 0; r < n; ++r) {
      const double up = Us(r, g.deflated);
      const double uk = Us(r, g.survivor);
      Us(r, g.deflated) = g.c * up - g.s * uk;
      Us(r, g.survivor) = g.s * up + g.c * uk;
    }
  }

  Vector values(n);
  DenseMatrix vectors(n, n);
  for (const DeflatedEigenpair& e : book.deflated_eigs) {
    values[e.index] = e.eigenvalue;
    for (std::size_t r = 0; r < n; ++r) vectors(r, e.index) = Us(r, e.index);
  }

  const SecularProblem& reduced = defl.reduced;
  if (reduced.size() > 0) {
    const SecularRoots roots = solve_secular(reduced);
    CauchySystem sys{reduced.d, roots.mu, reduced.z, {}};
    sys.col_norms = column_norms(sys.abar, sys.lambda, sys.mu);
    if (timings) timings->secular_ns += elapsed_ns(t0);

    t0 = Clock::now();
    const DenseMatrix active = select_columns(Us, book.active);
    const DenseMatrix rotated = apply_ctilde(sys, active, backend);
    // Active slots are refilled with the new eigenpairs in ascending order; the
    // final sort below places everything.
    for (std::size_t i = 0; i < book.active.size(); ++i) {
      const std::size_t slot = book.active[i];
      values[slot] = roots.mu[i];
      for (std::size_t r = 0; r < n; ++r) vectors(r, slot) = rotated(r, i);
    }
  } else if (timings) {
    timings->secular_ns += elapsed_ns(t0);
    t0 = Clock::now();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  for (std::size_t k = 0; k < n; ++k) {
    out.D[k] = values[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.U(r, k) = vectors(r, order[k]);
  }
  if (timings) timings->matvec_ns += elapsed_ns(t0);
  return out;
}

UpdateResult update_svd(const SVDFactors& svd, std::span<const double> a, std::span<const double> b,
                        const BackendChoice& backend) {
  check_factors(svd, a.size(), b.size());
  return update_svd(dense_from(svd), svd, a, b, backend);
}

UpdateResult update_svd(const DenseMatrix& A, const SVDFactors& svd, std::span<const double> a,
                        std::span<const double> b, const BackendChoice& backend) {
  check_factors(svd, a.size(), b.size());
  const std::size_t m = svd.U.rows();
  const std::size_t n = svd.V.rows();
  if (A.rows() != m || A.cols() != n) throw Error(ErrorKind::DimensionMismatch, "A does not match the factors");

  DenseMatrix A_hat = A;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) A_hat(i, j) += a[i] * b[j];
  }

  UpdateResult res;
  UpdateReport& rep = res.report;
  const auto start = Clock::now();
  if (all_zero(a) || all_zero(b)) {
    res.factors = svd;
  } else {
    auto t0 = Clock::now();
    const UpdateIngredients in = prepare_update(svd, a, b);
    const Schur2x2 qu = schur_sym_2x2({{{in.beta, 1.0}, {1.0, 0.0}}});
    const Schur2x2 qv = schur_sym_2x2({{{in.alpha, 1.0}, {1.0, 0.0}}});
    Vector a1(m), b1(m), a2(n), b2(n);
    for (std::size_t i = 0; i < m; ++i) {
      a1[i] = a[i] * qu.Q[0][0] + in.b_tilde[i] * qu.Q[1][0];
      b1[i] = a[i] * qu.Q[0][1] + in.b_tilde[i] * qu.Q[1][1];
    }
    for (std::size_t j = 0; j < n; ++j) {
      a2[j] = b[j] * qv.Q[0][0] + in.a_tilde[j] * qv.Q[1][0];
      b2[j] = b[j] * qv.Q[0][1] + in.a_tilde[j] * qv.Q[1][1];
    }
    rep.timings.prepare_ns += elapsed_ns(t0);

    PhaseTimes* tm = &rep.timings;
    SymEigenUpdate left = rank_one_sym_update(svd.U, in.Du, a1, qu.rho1, backend, tm);
    left = rank_one_sym_update(left.U, left.D, b1, qu.rho2, backend, tm);
    SymEigenUpdate right = rank_one_sym_update(svd.V, in.Dv, a2, qv.rho1, backend, tm);
    right = rank_one_sym_update(right.U, right.D, b2, qv.rho2, backend, tm);

    t0 = Clock::now();
    const auto lo = descending(left.D);
    const auto ro = descending(right.D);
    const double top = std::max({m ? left.D[lo[0]] : 0.0, n ? right.D[ro[0]] : 0.0, 0.0});
    Vector sigma(m);
    res.factors.U = DenseMatrix(m, m);
    for (std::size_t k = 0; k < m; ++k) {
      const double ev = left.D[lo[k]];
      if (ev < -1e-8 * top) rep.negative_clamped = true;
      sigma[k] = std::sqrt(std::max(ev, 0.0));
      res.factors.U.set_column(k, left.U.column(lo[k]));
      rep.sigma_consistency = std::max(rep.sigma_consistency, std::abs(ev - right.D[ro[k]]));
    }
    if (top > 0.0) rep.sigma_consistency /= top;
    res.factors.S = DiagRect(m, n, std::move(sigma));
    res.factors.V = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) res.factors.V.set_column(k, right.U.column(ro[k]));
    align_signs(res.factors, A_hat);
    rep.timings.matvec_ns += elapsed_ns(t0);
  }
  rep.timings.total_ns = elapsed_ns(start);

  rep.orth_u = orthogonality_defect(res.factors.U);
  rep.orth_v = orthogonality_defect(res.factors.V);
  rep.error = A_hat.max_abs() == 0.0 ? 0.0 : reconstruction_error(A_hat, res.factors);
  return res;
}

std::size_t align_signs(SVDFactors& f, const DenseMatrix& A_hat) {
  const std::size_t k = f.S.diag.size();
  const double smax = k ? *std::max_element(f.S.diag.begin(), f.S.diag.end()) : 0.0;
  const double tol = smax * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(A_hat.rows(), A_hat.cols()));
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(f.S.diag[i] > tol)) continue;
    const Vector av = matvec(A_hat, f.V.column(i));
    if (dot(f.U.column(i), av) < 0.0) {
      for (std::size_t r = 0; r < f.V.rows(); ++r) f.V(r, i) = -f.V(r, i);
      ++flipped;
    }
  }
  return flipped;
}

DenseMatrix reconstruct(const SVDFactors& f) {
  const std::size_t m = f.U.rows();
  const std::size_t n = f.V.rows();
  DenseMatrix out(m, n);
  const std::size_t k = f.S.diag.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double us = f.U(i, l) * f.S.diag[l];
      if (us == 0.0) continue;
      auto row = out.row(i);
      for (std::size_t j = 0; j < n; ++j) row[j] += us * f.V(j, l);
    }
  }
  return out;
}

double reconstruction_error(const DenseMatrix& A_hat, const SVDFactors& f) {
  if (A_hat.rows() != f.U.rows() || A_hat.cols() != f.V.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "factors do not match A_hat");
  }
  const double smax = largest_singular_value(A_hat);
  if (smax == 0.0) throw Error(ErrorKind::ZeroMatrix, "A_hat is zero");
  return max_abs_diff(A_hat, reconstruct(f)) / smax;
}

}  // namespace svdstream
