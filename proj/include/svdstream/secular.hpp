#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "svdstream/linalg.hpp"

namespace svdstream {

/// Data of w(mu) = 1 + rho * sum_i z_i^2 / (d_i - mu), with d ascending.
struct SecularProblem {
  Vector d;
  Vector z;
  double rho = 0.0;

  std::size_t size() const noexcept { return d.size(); }
};

/// Plane rotation that moved the weight of z[deflated] into z[survivor].
/// Both indices refer to positions in the sorted problem.
struct GivensRotation {
  std::size_t deflated = 0;
  std::size_t survivor = 0;
  double c = 1.0;
  double s = 0.0;
};

struct DeflatedEigenpair {
  std::size_t index = 0;  // position in the sorted problem
  double eigenvalue = 0.0;
};

struct DeflatedProblem {
  std::vector<std::size_t> permutation;  // sorted position k holds input index permutation[k]
  std::vector<std::size_t> active;       // sorted positions entering the secular equation
  std::vector<DeflatedEigenpair> deflated_eigs;
  std::vector<GivensRotation> rotations;  // in application order
};

struct DeflationResult {
  DeflatedProblem bookkeeping;
  SecularProblem reduced;
};

/// Roots of the secular equation, ascending. `origin[i]` is the index of the pole
/// the root was computed relative to and `tau[i] = mu[i] - d[origin[i]]`.
struct SecularRoots {
  Vector mu;
  Vector residuals;
  std::vector<std::size_t> origin;
  Vector tau;
  std::vector<int> iterations;
};

/// 1 + rho * sum z_i^2 / (d_i - mu). Throws PoleHit if mu sits on some d_i.
double secular_eval(const SecularProblem& p, double mu);

/// Default deflation tolerance: 1e-12 * max(max|d_i|, |rho| * ||z||^2).
double default_deflation_tol(const SecularProblem& p);

/// Removes zero components and merges (numerically) repeated poles.
/// A component deflates when |rho| * |z_i| * ||z|| <= tol; poles within tol of each
/// other are merged by plane rotations. Always succeeds.
DeflationResult deflate(const SecularProblem& p, std::optional<double> tol = std::nullopt);

/// Roots of an already deflated problem (distinct ascending d, nonzero z, rho != 0).
/// Each root is bracketed between its poles and refined with a safeguarded
/// two-pole rational step in the gap-relative variable tau. Throws NoConvergence.
SecularRoots solve_secular(const SecularProblem& p);

}  // namespace svdstream
