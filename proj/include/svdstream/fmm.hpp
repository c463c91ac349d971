#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "svdstream/linalg.hpp"

namespace svdstream {

/// p Chebyshev nodes t_i = cos((2i-1) pi / (2p)) on [-1, 1] (descending) and the
/// Lagrange basis u_j(t) over them, evaluated in barycentric form.
class ChebyshevGrid {
 public:
  explicit ChebyshevGrid(std::size_t p);

  std::size_t order() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Writes u_1(t) .. u_p(t) into `out` (length p).
  void basis(double t, std::span<double> out) const;
  Vector basis(double t) const;

  /// p x p matrix with entry (i, j) = u_j(map(t_i)).
  template <class Map>
  DenseMatrix shift_matrix(Map map) const {
    const std::size_t p = order();
    DenseMatrix m(p, p);
    for (std::size_t i = 0; i < p; ++i) basis(map(nodes_[i]), m.row(i));
    return m;
  }

 private:
  Vector nodes_;
  Vector weights_;
};

/// Throws InvalidOrder for p < 1.
ChebyshevGrid chebyshev_grid(std::size_t p);

/// Expansion order for a target precision: p = ceil(log_5(1/epsilon)).
std::size_t fmm_order(double epsilon);

/// Uniform binary tree over [lo, hi] and the precomputed operators of a 1-D FMM for
/// f(y) = sum_k alpha_k / (y - x_k). Coordinates are mapped affinely onto [-1, 1];
/// level l has 2^l cells of half-width 2^-l. Immutable once built.
struct FMMPlan {
  std::size_t p = 0;
  std::size_t s = 0;      // leaf capacity
  std::size_t nlevs = 0;  // leaf level
  double lo = 0.0;        // root interval in original coordinates
  double hi = 0.0;
  double center = 0.0;
  double half_width = 1.0;

  ChebyshevGrid grid{1};
  DenseMatrix ML, MR;          // child far field -> parent far field
  DenseMatrix SL, SR;          // parent local -> child local
  DenseMatrix T1, T2, T3, T4;  // far field -> local, source 3 right, 2 right, 2 left, 3 left

  Vector sources;  // original coordinates
  Vector targets;
  // Leaf membership in CSR form, input order within a leaf.
  std::vector<std::size_t> source_start, source_index;
  std::vector<std::size_t> target_start, target_index;
  std::vector<std::size_t> target_leaf;  // leaf of each target

  // Per-source far-field kernel t_k / (3r - t_k (x - x0)) at the leaf level (N x p).
  DenseMatrix source_kernel;
  // Per-target Chebyshev basis at the target's leaf-local coordinate (M x p).
  DenseMatrix target_basis;
  // Near field of each target (sources in its leaf and the two adjacent leaves) as
  // CSR lists of source index and 1 / (y - x) in original coordinates.
  std::vector<std::size_t> near_start, near_source;
  Vector near_kernel;

  std::size_t leaf_count() const noexcept { return std::size_t{1} << nlevs; }
  static std::size_t cell_count(std::size_t level) { return std::size_t{1} << level; }
  /// Center and half-width of cell i at `level` in normalized coordinates.
  double cell_center(std::size_t level, std::size_t i) const;
  double cell_radius(std::size_t level) const;
  double normalize(double x) const { return (x - center) / half_width; }
};

/// Phi (far field) and Psi (local) vectors, level-major, each cell a length-p block.
struct ExpansionSet {
  std::vector<Vector> phi;  // phi[level][cell * p + k]
  std::vector<Vector> psi;

  std::span<const double> far(std::size_t level, std::size_t cell, std::size_t p) const {
    return std::span<const double>(phi[level]).subspan(cell * p, p);
  }
  std::span<const double> local(std::size_t level, std::size_t cell, std::size_t p) const {
    return std::span<const double>(psi[level]).subspan(cell * p, p);
  }
};

/// Throws EmptyInput (no sources) and InvalidArgument (epsilon outside (0, 1)).
FMMPlan build_plan(std::span<const double> sources, std::span<const double> targets,
                   double epsilon);

/// Far-field vectors of the leaf cells.
ExpansionSet leaf_far_field(const FMMPlan& plan, std::span<const double> alpha);
/// Fills phi on levels nlevs-1 .. 2 from the children.
ExpansionSet upward_pass(const FMMPlan& plan, ExpansionSet expansions);
/// Fills psi on levels 2 .. nlevs from parents and interaction lists.
ExpansionSet downward_pass(const FMMPlan& plan, ExpansionSet expansions);

/// f(y_j) = sum_k alpha_k / (y_j - x_k) for every target. Throws PoleCollision.
Vector fmm_evaluate(const FMMPlan& plan, std::span<const double> alpha);

/// Row r of the result is sum_j U1[r, j] / (lambda_j - mu_i) over i, computed as an
/// FMM with charges -U1[r, :] at sources lambda and targets mu; one plan for all rows.
DenseMatrix fmm_matvec(std::span<const double> lambda, std::span<const double> mu,
                       const DenseMatrix& U1, double epsilon, std::size_t threads = 1);

}  // namespace svdstream
