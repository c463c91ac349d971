#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "svdstream/linalg.hpp"

namespace svdstream {

/// Polynomial in the monomial basis; coeffs[k] multiplies x^k.
struct Poly {
  Vector coeffs{0.0};

  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double operator()(double x) const;  // Horner
  friend bool operator==(const Poly&, const Poly&) = default;
};

Poly poly_multiply_schoolbook(const Poly& a, const Poly& b);
/// Linear convolution through a zero-padded real-input FFT of power-of-two length.
Poly poly_multiply_fft(const Poly& a, const Poly& b);

inline constexpr std::size_t kFftThresholdDegree = 32;

/// Coefficients of g(x) = prod_j (lambda_j - x) by a balanced product tree.
/// Products whose operands both have degree >= fft_threshold go through the FFT.
Poly poly_product_tree(std::span<const double> lambda,
                       std::size_t fft_threshold = kFftThresholdDegree);

Poly poly_derivative(const Poly& g);

/// g evaluated at every point by Horner's rule.
Vector multipoint_eval(const Poly& g, std::span<const double> points);

/// Interpolating polynomial through (xs[i], ys[i]); throws DuplicateNode.
/// Built from Newton divided differences over a Leja ordering of the nodes.
Poly interpolate(std::span<const double> xs, std::span<const double> ys);

inline constexpr std::size_t kFastMaxSize = 512;

/// Precomputed node data for repeated products with the same lambda and mu.
/// Works on lambda and mu affinely rescaled into [-1, 1].
class FastPlan {
 public:
  FastPlan(std::span<const double> lambda, std::span<const double> mu);

  /// f(mu_i) = sum_j u_j / (lambda_j - mu_i) = h(mu_i) / g(mu_i).
  Vector apply(std::span<const double> u) const;

  const Poly& g() const noexcept { return g_; }
  const Poly& g_prime() const noexcept { return g_prime_; }
  std::span<const double> scaled_lambda() const noexcept { return lambda_; }
  /// h interpolated from u; exposed for checking h(lambda_j) at the nodes.
  Poly h_for(std::span<const double> u) const;

 private:
  Vector lambda_;
  Vector mu_;
  double scale_ = 1.0;
  Poly g_;
  Poly g_prime_;
  Vector g_prime_at_lambda_;
  Vector g_at_mu_;
};

/// FAST Cauchy product: out[i] = sum_j u_j / (lambda_j - mu_i).
/// Throws DuplicateNode, PoleCollision, InvalidArgument (n > kFastMaxSize).
Vector fast_matvec(std::span<const double> lambda, std::span<const double> mu,
                   std::span<const double> u);

}  // namespace svdstream
