#include "svdstream/fast.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

#include "svdstream/cauchy.hpp"
#include "svdstream/errors.hpp"

namespace svdstream {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

void trim(Poly& p) {
  while (p.coeffs.size() > 1 && p.coeffs.back() == 0.0) p.coeffs.pop_back();
  if (p.coeffs.empty()) p.coeffs.push_back(0.0);
}

void require_distinct(std::span<const double> xs) {
  Vector sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      throw Error(ErrorKind::DuplicateNode, "repeated node " + std::to_string(sorted[i]));
    }
  }
}

// Leja ordering: start at the largest |x|, then repeatedly take the node that
// maximizes the product of distances to the nodes already chosen.
std::vector<std::size_t> leja_order(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  if (n == 0) return order;
  std::vector<bool> used(n, false);
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(xs[i]) > std::abs(xs[first])) first = i;
  }
  order.push_back(first);
  used[first] = true;
  // Log-distances avoid under/overflow of the running products.
  Vector score(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double last = xs[order.back()];
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      score[i] += std::log(std::abs(xs[i] - last));
      if (best == n || score[i] > score[best]) best = i;
    }
    order.push_back(best);
    used[best] = true;
  }
  return order;
}

}  // namespace

double Poly::operator()(double x) const {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

Poly poly_multiply_schoolbook(const Poly& a, const Poly& b) {
  Poly c;
  c.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  trim(c);
  return c;
}

Poly poly_multiply_fft(const Poly& a, const Poly& b) {
  const std::size_t out_len = a.coeffs.size() + b.coeffs.size() - 1;
  std::size_t len = 1;
  while (len < out_len) len <<= 1;
  const std::size_t spec_len = len / 2 + 1;

  std::unique_ptr<double, FftwFree> ra(fftw_alloc_real(len));
  std::unique_ptr<double, FftwFree> rb(fftw_alloc_real(len));
  std::unique_ptr<fftw_complex, FftwFree> fa(fftw_alloc_complex(spec_len));
  std::unique_ptr<fftw_complex, FftwFree> fb(fftw_alloc_complex(spec_len));

  fftw_plan pa;
  fftw_plan pb;
  fftw_plan inv;
  {
    std::lock_guard lock(fftw_planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(len), ra.get(), fa.get(), FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(len), rb.get(), fb.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(len), fa.get(), ra.get(), FFTW_ESTIMATE);
  }
  std::fill_n(ra.get(), len, 0.0);
  std::fill_n(rb.get(), len, 0.0);
  std::copy(a.coeffs.begin(), a.coeffs.end(), ra.get());
  std::copy(b.coeffs.begin(), b.coeffs.end(), rb.get());
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < spec_len; ++k) {
    const double re = fa.get()[k][0] * fb.get()[k][0] - fa.get()[k][1] * fb.get()[k][1];
    const double im = fa.get()[k][0] * fb.get()[k][1] + fa.get()[k][1] * fb.get()[k][0];
    fa.get()[k][0] = re;
    fa.get()[k][1] = im;
  }
  fftw_execute(inv);

  Poly c;
  c.coeffs.resize(out_len);
  const double norm = 1.0 / static_cast<double>(len);
  for (std::size_t k = 0; k < out_len; ++k) c.coeffs[k] = ra.get()[k] * norm;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }
  trim(c);
  return c;
}

Poly poly_product_tree(std::span<const double> lambda, std::size_t fft_threshold) {
  if (lambda.empty()) return Poly{{1.0}};
  std::vector<Poly> level;
  level.reserve(lambda.size());
  for (double l : lambda) level.push_back(Poly{{l, -1.0}});
  while (level.size() > 1) {
    std::vector<Poly> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const Poly& a = level[i];
      const Poly& b = level[i + 1];
      const bool use_fft = std::min(a.degree(), b.degree()) >= fft_threshold;
      next.push_back(use_fft ? poly_multiply_fft(a, b) : poly_multiply_schoolbook(a, b));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return level.front();
}

Poly poly_derivative(const Poly& g) {
  if (g.coeffs.size() <= 1) return Poly{{0.0}};
  Poly d;
  d.coeffs.resize(g.coeffs.size() - 1);
  for (std::size_t k = 1; k < g.coeffs.size(); ++k) {
    d.coeffs[k - 1] = static_cast<double>(k) * g.coeffs[k];
  }
  trim(d);
  return d;
}

Vector multipoint_eval(const Poly& g, std::span<const double> points) {
  Vector out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = g(points[i]);
  return out;
}

Poly interpolate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::DimensionMismatch, "interpolate");
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "interpolate needs at least one node");
  require_distinct(xs);

  const std::size_t n = xs.size();
  const auto order = leja_order(xs);
  Vector x(n);
  Vector c(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = xs[order[i]];
    c[i] = ys[order[i]];
  }
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - k]);
    }
  }
  // Newton form to monomial coefficients: p <- p * (x - x_i) + c_i.
  Vector p{c[n - 1]};
  for (std::size_t i = n - 1; i-- > 0;) {
    Vector q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k + 1] += p[k];
      q[k] -= x[i] * p[k];
    }
    q[0] += c[i];
    p = std::move(q);
  }
  Poly out{std::move(p)};
  trim(out);
  return out;
}

FastPlan::FastPlan(std::span<const double> lambda, std::span<const double> mu) {
  if (lambda.size() > kFastMaxSize) {
    throw Error(ErrorKind::InvalidArgument,
                "FAST backend supports n <= " + std::to_string(kFastMaxSize));
  }
  require_distinct(lambda);
  check_pole_separation(lambda, mu);
  if (lambda.empty()) {
    mu_.assign(mu.size(), 0.0);
    g_at_mu_.assign(mu.size(), 1.0);
    return;
  }

  double lo = lambda[0];
  double hi = lambda[0];
  for (double v : lambda) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : mu) lo = std::min(lo, v), hi = std::max(hi, v);
  const double center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  if (half == 0.0) half = 1.0;
  scale_ = half;
  lambda_.resize(lambda.size());
  mu_.resize(mu.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) lambda_[i] = (lambda[i] - center) / half;
  for (std::size_t i = 0; i < mu.size(); ++i) mu_[i] = (mu[i] - center) / half;

  g_ = poly_product_tree(lambda_);
  g_prime_ = poly_derivative(g_);
  g_prime_at_lambda_ = multipoint_eval(g_prime_, lambda_);
  g_at_mu_ = multipoint_eval(g_, mu_);
}

Poly FastPlan::h_for(std::span<const double> u) const {
  if (u.size() != lambda_.size()) throw Error(ErrorKind::DimensionMismatch, "u length");
  // h(lambda_j) = u_j * prod_{k != j}(lambda_k - lambda_j) = -u_j * g'(lambda_j).
  Vector hj(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) hj[j] = -u[j] * g_prime_at_lambda_[j];
  return interpolate(lambda_, hj);
}

Vector FastPlan::apply(std::span<const double> u) const {
  if (u.size() != lambda_.size()) throw Error(ErrorKind::DimensionMismatch, "u length");
  if (u.empty()) return Vector(mu_.size(), 0.0);
  const Poly h = h_for(u);
  Vector out(mu_.size());
  for (std::size_t i = 0; i < mu_.size(); ++i) out[i] = h(mu_[i]) / g_at_mu_[i] / scale_;
  return out;
}

Vector fast_matvec(std::span<const double> lambda, std::span<const double> mu,
                   std::span<const double> u) {
  return FastPlan(lambda, mu).apply(u);
}

}  // namespace svdstream
