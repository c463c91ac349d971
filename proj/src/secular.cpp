#include "svdstream/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "svdstream/errors.hpp"

namespace svdstream {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 100;
constexpr double kResidualTol = 1e-13;

double spacing(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

void require_finite(const SecularProblem& p) {
  if (p.d.size() != p.z.size()) throw Error(ErrorKind::DimensionMismatch, "d and z lengths");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(p.d.begin(), p.d.end(), finite) ||
      !std::all_of(p.z.begin(), p.z.end(), finite) || !std::isfinite(p.rho)) {
    throw Error(ErrorKind::NonFinite, "secular problem data");
  }
}

struct RootResult {
  std::size_t origin = 0;
  double tau = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Partial sums of the secular function at mu = d[origin] + tau, split into the
// terms modelled by the lower pole (j < split) and by the upper pole (j >= split).
struct SecularSums {
  double lower = 0.0;
  double lower_deriv = 0.0;
  double upper = 0.0;
  double upper_deriv = 0.0;
  double value() const { return 1.0 + lower + upper; }
  double magnitude() const { return std::abs(lower) + std::abs(upper); }
};

SecularSums secular_sums(const Vector& d, const Vector& weight, std::size_t origin, double tau,
                         std::size_t split) {
  SecularSums s;
  const double d0 = d[origin];
  for (std::size_t j = 0; j < split; ++j) {
    const double inv = 1.0 / ((d[j] - d0) - tau);
    const double t = weight[j] * inv;
    s.lower += t;
    s.lower_deriv += t * inv;
  }
  for (std::size_t j = split; j < d.size(); ++j) {
    const double inv = 1.0 / ((d[j] - d0) - tau);
    const double t = weight[j] * inv;
    s.upper += t;
    s.upper_deriv += t * inv;
  }
  return s;
}

// Root i of w for rho > 0 with weight_j = rho * z_j^2.
RootResult solve_one_root(const Vector& d, const Vector& weight, double total_weight,
                          std::size_t i) {
  const std::size_t n = d.size();
  RootResult r;
  if (n == 1) {
    r.origin = 0;
    r.tau = total_weight;
    return r;
  }

  double lo = 0.0;
  double hi = 0.0;
  std::size_t split = 0;
  std::size_t lower_pole = 0;
  std::size_t upper_pole = 0;
  if (i + 1 < n) {
    const double gap = d[i + 1] - d[i];
    const double half = 0.5 * gap;
    const double w_mid = secular_sums(d, weight, i, half, i + 1).value();
    if (w_mid >= 0.0) {
      r.origin = i;
      lo = 0.0;
      hi = half;
    } else {
      r.origin = i + 1;
      lo = -half;
      hi = 0.0;
    }
    if (w_mid == 0.0) {
      r.tau = half;
      return r;
    }
    split = i + 1;
    lower_pole = i;
    upper_pole = i + 1;
  } else {
    r.origin = n - 1;
    lo = 0.0;
    hi = total_weight;
    split = n - 1;
    lower_pole = n - 2;
    upper_pole = n - 1;
  }
  const double d0 = d[r.origin];
  const double pole_lo = d[lower_pole] - d0;
  const double pole_hi = d[upper_pole] - d0;

  double tau = 0.5 * (lo + hi);
  bool converged = false;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const SecularSums s = secular_sums(d, weight, r.origin, tau, split);
    const double w = s.value();
    if (w == 0.0 || std::abs(w) <= kResidualTol * (1.0 + s.magnitude())) {
      converged = true;
      break;
    }
    if (w > 0.0) {
      hi = tau;
    } else {
      lo = tau;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) {
      converged = true;
      break;
    }

    // Two-pole rational model: c + b1/(DL - eta) + b2/(DU - eta) = 0, matching
    // value and slope of each partial sum at the current iterate.
    const double dl = pole_lo - tau;
    const double du = pole_hi - tau;
    const double c = w - s.lower_deriv * dl - s.upper_deriv * du;
    const double a = c * (dl + du) + s.lower_deriv * dl * dl + s.upper_deriv * du * du;
    const double b = dl * du * w;

    double step = std::numeric_limits<double>::quiet_NaN();
    auto inside = [&](double eta) {
      const double t = tau + eta;
      return std::isfinite(t) && t > lo && t < hi;
    };
    if (c == 0.0) {
      if (a != 0.0 && inside(b / a)) step = b / a;
    } else {
      const double disc = a * a - 4.0 * c * b;
      if (disc >= 0.0) {
        const double q = 0.5 * (a + std::copysign(std::sqrt(disc), a));
        const double e1 = q / c;
        const double e2 = q != 0.0 ? b / q : e1;
        const bool ok1 = inside(e1);
        const bool ok2 = inside(e2);
        if (ok1 && ok2) {
          step = std::abs(e1) <= std::abs(e2) ? e1 : e2;
        } else if (ok1) {
          step = e1;
        } else if (ok2) {
          step = e2;
        }
      }
    }

    double next = std::isnan(step) ? 0.5 * (lo + hi) : tau + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool tiny = std::abs(next - tau) <= kEps * std::abs(tau);
    tau = next;
    if (tiny) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "root " << i << " bracket [" << d0 + lo << ", " << d0 + hi << "]";
    throw Error(ErrorKind::NoConvergence, msg.str());
  }
  r.tau = tau;
  r.iterations = it;
  r.residual = std::abs(secular_sums(d, weight, r.origin, tau, split).value());
  return r;
}

}  // namespace

double secular_eval(const SecularProblem& p, double mu) {
  require_finite(p);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p.d[i] - mu;
    if (std::abs(diff) < spacing(std::max(std::abs(p.d[i]), std::abs(mu))) || diff == 0.0) {
      throw Error(ErrorKind::PoleHit, "mu coincides with d[" + std::to_string(i) + "]");
    }
    sum += p.z[i] * p.z[i] / diff;
  }
  return 1.0 + p.rho * sum;
}

double default_deflation_tol(const SecularProblem& p) {
  double dmax = 0.0;
  for (double v : p.d) dmax = std::max(dmax, std::abs(v));
  const double zn = norm2(p.z);
  return 1e-12 * std::max(dmax, std::abs(p.rho) * zn * zn);
}

DeflationResult deflate(const SecularProblem& p, std::optional<double> tol_opt) {
  require_finite(p);
  const std::size_t n = p.size();
  const double tol = tol_opt.value_or(default_deflation_tol(p));
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "deflation tolerance must be > 0");

  DeflationResult out;
  DeflatedProblem& book = out.bookkeeping;
  book.permutation.resize(n);
  std::iota(book.permutation.begin(), book.permutation.end(), std::size_t{0});
  std::stable_sort(book.permutation.begin(), book.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return p.d[a] < p.d[b]; });
  Vector d(n);
  Vector z(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = p.d[book.permutation[k]];
    z[k] = p.z[book.permutation[k]];
  }

  const double znorm = norm2(z);
  std::vector<bool> gone(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(p.rho) * std::abs(z[k]) * znorm <= tol) {
      gone[k] = true;
      book.deflated_eigs.push_back({k, d[k]});
    }
  }

  // Merge poles closer than tol; the later index of each pair survives.
  std::optional<std::size_t> prev;
  for (std::size_t k = 0; k < n; ++k) {
    if (gone[k]) continue;
    if (prev && std::abs(d[k] - d[*prev]) <= tol) {
      const std::size_t j = *prev;
      const double r = std::hypot(z[j], z[k]);
      GivensRotation g{j, k, z[k] / r, z[j] / r};
      z[k] = r;
      z[j] = 0.0;
      gone[j] = true;
      book.rotations.push_back(g);
      book.deflated_eigs.push_back({j, d[j]});
    }
    prev = k;
  }

  std::sort(book.deflated_eigs.begin(), book.deflated_eigs.end(),
            [](const DeflatedEigenpair& a, const DeflatedEigenpair& b) { return a.index < b.index; });
  out.reduced.rho = p.rho;
  for (std::size_t k = 0; k < n; ++k) {
    if (gone[k]) continue;
    book.active.push_back(k);
    out.reduced.d.push_back(d[k]);
    out.reduced.z.push_back(z[k]);
  }
  return out;
}

SecularRoots solve_secular(const SecularProblem& p) {
  require_finite(p);
  const std::size_t n = p.size();
  SecularRoots out;
  if (n == 0) return out;
  if (p.rho == 0.0) throw Error(ErrorKind::InvalidArgument, "rho must be nonzero");
  for (std::size_t i = 0; i < n; ++i) {
    if (p.z[i] == 0.0) {
      throw Error(ErrorKind::InvalidArgument, "z[" + std::to_string(i) + "] is zero; deflate first");
    }
    if (i > 0 && !(p.d[i] > p.d[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "d must be strictly ascending; deflate first");
    }
  }

  // rho < 0 is solved as the mirrored problem (-d reversed, -rho).
  const bool mirrored = p.rho < 0.0;
  Vector d(n);
  Vector weight(n);
  const double rho = std::abs(p.rho);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = mirrored ? n - 1 - k : k;
    d[k] = mirrored ? -p.d[src] : p.d[src];
    weight[k] = rho * p.z[src] * p.z[src];
  }
  double total = 0.0;
  for (double w : weight) total += w;

  out.mu.resize(n);
  out.residuals.resize(n);
  out.origin.resize(n);
  out.tau.resize(n);
  out.iterations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RootResult r = solve_one_root(d, weight, total, i);
    const std::size_t slot = mirrored ? n - 1 - i : i;
    const std::size_t origin = mirrored ? n - 1 - r.origin : r.origin;
    out.origin[slot] = origin;
    out.tau[slot] = mirrored ? -r.tau : r.tau;
    out.mu[slot] = p.d[origin] + out.tau[slot];
    out.residuals[slot] = r.residual;
    out.iterations[slot] = r.iterations;
  }
  return out;
}

}  // namespace svdstream
