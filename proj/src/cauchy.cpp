#include "svdstream/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "svdstream/errors.hpp"
#include "svdstream/fast.hpp"
#include "svdstream/fmm.hpp"

namespace svdstream {
namespace {

double spacing(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

double checked_diff(double lam, double mu, std::size_t i, std::size_t j) {
  const double diff = lam - mu;
  if (std::abs(diff) < spacing(std::max(std::abs(lam), std::abs(mu))) || diff == 0.0) {
    throw Error(ErrorKind::PoleCollision,
                "lambda[" + std::to_string(i) + "] coincides with mu[" + std::to_string(j) + "]");
  }
  return diff;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, what);
  }
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Naive: return "naive";
    case Backend::Fast: return "fast";
    case Backend::Fmm: return "fmm";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "naive") return Backend::Naive;
  if (name == "fast") return Backend::Fast;
  if (name == "fmm") return Backend::Fmm;
  throw Error(ErrorKind::InvalidArgument, "unknown backend '" + std::string(name) + "'");
}

void check_pole_separation(std::span<const double> lambda, std::span<const double> mu) {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) checked_diff(lambda[i], mu[j], i, j);
  }
}

DenseMatrix build_cauchy(std::span<const double> lambda, std::span<const double> mu) {
  DenseMatrix c(lambda.size(), mu.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) c(i, j) = 1.0 / checked_diff(lambda[i], mu[j], i, j);
  }
  return c;
}

Vector cauchy_matvec_naive(std::span<const double> lambda, std::span<const double> mu,
                           std::span<const double> u) {
  if (u.size() != lambda.size()) throw Error(ErrorKind::DimensionMismatch, "u length != lambda length");
  Vector out(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) s += u[j] / checked_diff(lambda[j], mu[i], j, i);
    out[i] = s;
  }
  return out;
}

Vector column_norms(std::span<const double> abar, std::span<const double> lambda,
                    std::span<const double> mu) {
  if (abar.size() != lambda.size()) throw Error(ErrorKind::DimensionMismatch, "abar length != lambda length");
  Vector out(mu.size());
  Vector terms(lambda.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < lambda.size(); ++j) terms[j] = abar[j] / checked_diff(lambda[j], mu[i], j, i);
    out[i] = norm2(terms);
    if (!(out[i] > 0.0)) throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(i) + " of diag(abar) C vanishes");
  }
  return out;
}

namespace {

// Row r of the result: sum_j U1[r, j] / (lambda_j - mu_i) over i.
DenseMatrix naive_rows(std::span<const double> lambda, std::span<const double> mu,
                       const DenseMatrix& U1, std::size_t threads) {
  const std::size_t n = lambda.size();
  DenseMatrix out(U1.rows(), mu.size());
  // Target-major: n inverses per target, reused across every row.
  detail::parallel_for(mu.size(), threads, [&](std::size_t i) {
    Vector inv(n);
    for (std::size_t j = 0; j < n; ++j) inv[j] = 1.0 / checked_diff(lambda[j], mu[i], j, i);
    for (std::size_t r = 0; r < U1.rows(); ++r) {
      auto row = U1.row(r);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * inv[j];
      out(r, i) = s;
    }
  });
  return out;
}

DenseMatrix fast_rows(std::span<const double> lambda, std::span<const double> mu,
                      const DenseMatrix& U1, std::size_t threads) {
  DenseMatrix out(U1.rows(), mu.size());
  if (lambda.empty()) return out;
  const FastPlan plan(lambda, mu);
  detail::parallel_for(U1.rows(), threads, [&](std::size_t r) {
    const Vector f = plan.apply(U1.row(r));
    std::copy(f.begin(), f.end(), out.row(r).begin());
  });
  return out;
}

}  // namespace

DenseMatrix apply_ctilde(const CauchySystem& sys, const DenseMatrix& U, const BackendChoice& backend) {
  const std::size_t n = sys.size();
  if (sys.mu.size() != n || sys.abar.size() != n || sys.col_norms.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent CauchySystem");
  }
  if (U.cols() != n) throw Error(ErrorKind::DimensionMismatch, "U columns != system size");
  check_finite(sys.lambda, "lambda");
  check_finite(sys.mu, "mu");

  DenseMatrix U1 = U;
  for (std::size_t r = 0; r < U1.rows(); ++r) {
    auto row = U1.row(r);
    for (std::size_t j = 0; j < n; ++j) row[j] *= sys.abar[j];
  }

  DenseMatrix U2;
  const std::size_t threads = std::max<std::size_t>(1, backend.threads);
  switch (backend.kind) {
    case Backend::Naive: U2 = naive_rows(sys.lambda, sys.mu, U1, threads); break;
    case Backend::Fast: U2 = fast_rows(sys.lambda, sys.mu, U1, threads); break;
    case Backend::Fmm: U2 = fmm_matvec(sys.lambda, sys.mu, U1, backend.epsilon, threads); break;
  }

  if (!U2.all_finite()) {
    throw Error(ErrorKind::NonFinite, std::string(to_string(backend.kind)) + " backend produced non-finite values");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sys.col_norms[i] > 0.0)) throw Error(ErrorKind::ZeroColumn, "zero column norm " + std::to_string(i));
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < U2.rows(); ++r) {
      const double v = std::abs(U2(r, i));
      if (v > best) best = v, arg = r;
    }
    const double scale = (U2.rows() > 0 && U2(arg, i) < 0.0 ? -1.0 : 1.0) / sys.col_norms[i];
    for (std::size_t r = 0; r < U2.rows(); ++r) U2(r, i) *= scale;
  }
  return U2;
}

}  // namespace svdstream
