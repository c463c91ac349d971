#include "svdstream/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "svdstream/errors.hpp"

namespace svdstream {
namespace {

double spacing(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

// y += M x for a p x p matrix.
void gemv_add(const DenseMatrix& m, std::span<const double> x, std::span<double> y) {
  const std::size_t p = m.rows();
  for (std::size_t i = 0; i < p; ++i) {
    auto row = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

std::size_t leaf_of(const FMMPlan& plan, double x) {
  const double u = (plan.normalize(x) + 1.0) * 0.5 * static_cast<double>(plan.leaf_count());
  const double clamped = std::clamp(std::floor(u), 0.0, static_cast<double>(plan.leaf_count() - 1));
  return static_cast<std::size_t>(clamped);
}

void bucket(const FMMPlan& plan, std::span<const double> pts, std::vector<std::size_t>& start,
            std::vector<std::size_t>& index, std::vector<std::size_t>* leaf_out) {
  const std::size_t leaves = plan.leaf_count();
  std::vector<std::size_t> leaf(pts.size());
  start.assign(leaves + 1, 0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    leaf[k] = leaf_of(plan, pts[k]);
    ++start[leaf[k] + 1];
  }
  for (std::size_t c = 0; c < leaves; ++c) start[c + 1] += start[c];
  index.resize(pts.size());
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t k = 0; k < pts.size(); ++k) index[fill[leaf[k]]++] = k;
  if (leaf_out) *leaf_out = std::move(leaf);
}

}  // namespace

ChebyshevGrid::ChebyshevGrid(std::size_t p) {
  if (p < 1) throw Error(ErrorKind::InvalidOrder, "expansion order must be >= 1");
  nodes_.resize(p);
  weights_.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double theta = static_cast<double>(2 * i + 1) * std::numbers::pi / (2.0 * static_cast<double>(p));
    nodes_[i] = std::cos(theta);
    weights_[i] = (i % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
  }
}

void ChebyshevGrid::basis(double t, std::span<double> out) const {
  const std::size_t p = nodes_.size();
  for (std::size_t j = 0; j < p; ++j) {
    if (t == nodes_[j]) {
      std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(p), 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    out[j] = weights_[j] / (t - nodes_[j]);
    sum += out[j];
  }
  for (std::size_t j = 0; j < p; ++j) out[j] /= sum;
}

Vector ChebyshevGrid::basis(double t) const {
  Vector out(nodes_.size());
  basis(t, out);
  return out;
}

ChebyshevGrid chebyshev_grid(std::size_t p) { return ChebyshevGrid(p); }

std::size_t fmm_order(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  // The small slack keeps exact powers of 5 (e.g. 5^-20) from rounding up.
  const double p = std::ceil(std::log(1.0 / epsilon) / std::log(5.0) - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, p));
}

double FMMPlan::cell_center(std::size_t level, std::size_t i) const {
  const double r = cell_radius(level);
  return -1.0 + (2.0 * static_cast<double>(i) + 1.0) * r;
}

double FMMPlan::cell_radius(std::size_t level) const {
  return std::ldexp(1.0, -static_cast<int>(level));
}

FMMPlan build_plan(std::span<const double> sources, std::span<const double> targets,
                   double epsilon) {
  if (sources.empty()) throw Error(ErrorKind::EmptyInput, "FMM needs at least one source");
  FMMPlan plan;
  plan.p = fmm_order(epsilon);
  plan.s = 2 * plan.p;
  const std::size_t n = sources.size();
  while ((plan.s << plan.nlevs) < n) ++plan.nlevs;

  double lo = sources[0];
  double hi = sources[0];
  for (double x : sources) lo = std::min(lo, x), hi = std::max(hi, x);
  for (double y : targets) lo = std::min(lo, y), hi = std::max(hi, y);
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorKind::NonFinite, "FMM points");
  plan.lo = lo;
  plan.hi = hi;
  plan.center = 0.5 * (lo + hi);
  plan.half_width = 0.5 * (hi - lo) * (1.0 + 1e-12);
  if (plan.half_width == 0.0) plan.half_width = std::max(1.0, std::abs(plan.center));

  plan.grid = ChebyshevGrid(plan.p);
  const auto& g = plan.grid;
  plan.ML = g.shift_matrix([](double t) { return 3.0 * t / (6.0 + t); });
  plan.MR = g.shift_matrix([](double t) { return 3.0 * t / (6.0 - t); });
  plan.SL = g.shift_matrix([](double t) { return 0.5 * (t - 1.0); });
  plan.SR = g.shift_matrix([](double t) { return 0.5 * (t + 1.0); });
  plan.T1 = g.shift_matrix([](double t) { return 3.0 / (t - 6.0); });
  plan.T2 = g.shift_matrix([](double t) { return 3.0 / (t - 4.0); });
  plan.T3 = g.shift_matrix([](double t) { return 3.0 / (t + 4.0); });
  plan.T4 = g.shift_matrix([](double t) { return 3.0 / (t + 6.0); });

  plan.sources.assign(sources.begin(), sources.end());
  plan.targets.assign(targets.begin(), targets.end());
  bucket(plan, sources, plan.source_start, plan.source_index, nullptr);
  bucket(plan, targets, plan.target_start, plan.target_index, &plan.target_leaf);

  const std::size_t p = plan.p;
  const std::size_t leaves = plan.leaf_count();
  const double r = plan.cell_radius(plan.nlevs);
  const auto nodes = g.nodes();

  plan.source_kernel = DenseMatrix(n, p);
  for (std::size_t c = 0; c < leaves; ++c) {
    const double x0 = plan.cell_center(plan.nlevs, c);
    for (std::size_t q = plan.source_start[c]; q < plan.source_start[c + 1]; ++q) {
      const std::size_t k = plan.source_index[q];
      const double d = plan.normalize(sources[k]) - x0;
      auto row = plan.source_kernel.row(k);
      for (std::size_t m = 0; m < p; ++m) row[m] = nodes[m] / (3.0 * r - nodes[m] * d);
    }
  }

  const std::size_t mcount = targets.size();
  plan.target_basis = DenseMatrix(mcount, p);
  plan.near_start.assign(mcount + 1, 0);
  for (std::size_t j = 0; j < mcount; ++j) {
    const std::size_t c = plan.target_leaf[j];
    const double t = (plan.normalize(targets[j]) - plan.cell_center(plan.nlevs, c)) / r;
    g.basis(std::clamp(t, -1.0, 1.0), plan.target_basis.row(j));

    const std::size_t first = c == 0 ? 0 : c - 1;
    const std::size_t last = std::min(leaves - 1, c + 1);
    for (std::size_t cc = first; cc <= last; ++cc) {
      for (std::size_t q = plan.source_start[cc]; q < plan.source_start[cc + 1]; ++q) {
        const std::size_t k = plan.source_index[q];
        const double diff = targets[j] - sources[k];
        if (diff == 0.0 ||
            std::abs(diff) < spacing(std::max(std::abs(targets[j]), std::abs(sources[k])))) {
          throw Error(ErrorKind::PoleCollision, "target " + std::to_string(j) +
                                                    " coincides with source " + std::to_string(k));
        }
        plan.near_source.push_back(k);
        plan.near_kernel.push_back(1.0 / diff);
      }
    }
    plan.near_start[j + 1] = plan.near_source.size();
  }
  return plan;
}

ExpansionSet leaf_far_field(const FMMPlan& plan, std::span<const double> alpha) {
  if (alpha.size() != plan.sources.size()) {
    throw Error(ErrorKind::DimensionMismatch, "alpha length != number of sources");
  }
  const std::size_t p = plan.p;
  ExpansionSet e;
  e.phi.resize(plan.nlevs + 1);
  e.psi.resize(plan.nlevs + 1);
  for (std::size_t l = 0; l <= plan.nlevs; ++l) {
    e.phi[l].assign(FMMPlan::cell_count(l) * p, 0.0);
    e.psi[l].assign(FMMPlan::cell_count(l) * p, 0.0);
  }
  auto& leaf_phi = e.phi[plan.nlevs];
  for (std::size_t c = 0; c < plan.leaf_count(); ++c) {
    double* out = leaf_phi.data() + c * p;
    for (std::size_t q = plan.source_start[c]; q < plan.source_start[c + 1]; ++q) {
      const std::size_t k = plan.source_index[q];
      const double a = alpha[k];
      auto row = plan.source_kernel.row(k);
      for (std::size_t m = 0; m < p; ++m) out[m] += a * row[m];
    }
  }
  return e;
}

ExpansionSet upward_pass(const FMMPlan& plan, ExpansionSet e) {
  const std::size_t p = plan.p;
  for (std::size_t l = plan.nlevs; l-- > 2;) {
    for (std::size_t i = 0; i < FMMPlan::cell_count(l); ++i) {
      std::span<double> parent(e.phi[l].data() + i * p, p);
      gemv_add(plan.ML, e.far(l + 1, 2 * i, p), parent);
      gemv_add(plan.MR, e.far(l + 1, 2 * i + 1, p), parent);
    }
  }
  return e;
}

ExpansionSet downward_pass(const FMMPlan& plan, ExpansionSet e) {
  const std::size_t p = plan.p;
  // Level 1 has no well-separated pairs, so its local expansions stay zero and the
  // first translations land on level 2.
  for (std::size_t l = 1; l < plan.nlevs; ++l) {
    const std::size_t child_level = l + 1;
    const auto cells = static_cast<std::ptrdiff_t>(FMMPlan::cell_count(child_level));
    auto translate = [&](const DenseMatrix& t, std::ptrdiff_t src, std::span<double> out) {
      if (src < 0 || src >= cells) return;
      gemv_add(t, e.far(child_level, static_cast<std::size_t>(src), p), out);
    };
    for (std::size_t i = 0; i < FMMPlan::cell_count(l); ++i) {
      const auto left = static_cast<std::ptrdiff_t>(2 * i);
      const auto right = left + 1;
      std::span<double> psi_left(e.psi[child_level].data() + static_cast<std::size_t>(left) * p, p);
      std::span<double> psi_right(e.psi[child_level].data() + static_cast<std::size_t>(right) * p, p);
      gemv_add(plan.SL, e.local(l, i, p), psi_left);
      translate(plan.T3, left - 2, psi_left);
      translate(plan.T2, left + 2, psi_left);
      translate(plan.T1, left + 3, psi_left);
      gemv_add(plan.SR, e.local(l, i, p), psi_right);
      translate(plan.T4, right - 3, psi_right);
      translate(plan.T3, right - 2, psi_right);
      translate(plan.T2, right + 2, psi_right);
    }
  }
  return e;
}

Vector fmm_evaluate(const FMMPlan& plan, std::span<const double> alpha) {
  if (alpha.size() != plan.sources.size()) {
    throw Error(ErrorKind::DimensionMismatch, "alpha length != number of sources");
  }
  const std::size_t p = plan.p;
  const std::size_t m = plan.targets.size();
  Vector out(m, 0.0);
  if (plan.nlevs >= 2) {
    const ExpansionSet e = downward_pass(plan, upward_pass(plan, leaf_far_field(plan, alpha)));
    const double inv_scale = 1.0 / plan.half_width;
    for (std::size_t j = 0; j < m; ++j) {
      const auto psi = e.local(plan.nlevs, plan.target_leaf[j], p);
      auto basis = plan.target_basis.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += basis[k] * psi[k];
      out[j] = s * inv_scale;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t q = plan.near_start[j]; q < plan.near_start[j + 1]; ++q) {
      s += alpha[plan.near_source[q]] * plan.near_kernel[q];
    }
    out[j] += s;
  }
  return out;
}

DenseMatrix fmm_matvec(std::span<const double> lambda, std::span<const double> mu,
                       const DenseMatrix& U1, double epsilon, std::size_t threads) {
  if (U1.cols() != lambda.size()) throw Error(ErrorKind::DimensionMismatch, "U1 columns");
  DenseMatrix out(U1.rows(), mu.size());
  if (lambda.empty() || U1.rows() == 0) return out;
  const FMMPlan plan = build_plan(lambda, mu, epsilon);
  detail::parallel_for(U1.rows(), threads, [&](std::size_t r) {
    Vector charges(U1.row(r).begin(), U1.row(r).end());
    for (double& c : charges) c = -c;
    const Vector f = fmm_evaluate(plan, charges);
    std::copy(f.begin(), f.end(), out.row(r).begin());
  });
  return out;
}

}  // namespace svdstream
