#include <doctest.h>

#include <cmath>

#include "svdstream/cauchy.hpp"
#include "svdstream/errors.hpp"
#include "svdstream/fmm.hpp"
#include "test_support.hpp"

using namespace svdstream;
using svdstream::testing::rel_diff;

namespace {

struct Instance {
  Vector x, y, alpha;
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Instance in;
  random_interlaced(n, rng, in.x, in.y);
  in.alpha = random_vector(n, -1, 1, rng);
  return in;
}

Vector direct(const Instance& in) {
  Vector neg(in.alpha);
  for (double& a : neg) a = -a;
  return cauchy_matvec_naive(in.x, in.y, neg);
}

std::size_t cell_of(const FMMPlan& plan, std::size_t level, double x) {
  const double u = (plan.normalize(x) + 1.0) * 0.5 * static_cast<double>(FMMPlan::cell_count(level));
  return static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(FMMPlan::cell_count(level) - 1)));
}

}  // namespace

TEST_CASE("Chebyshev grid") {
  CHECK_THROWS_AS(chebyshev_grid(0), Error);
  const ChebyshevGrid g(5);
  CHECK(g.order() == 5);
  CHECK(g.nodes()[0] == doctest::Approx(std::cos(M_PI / 10)));
  for (std::size_t j = 0; j < 5; ++j) {
    const Vector e = g.basis(g.nodes()[j]);
    for (std::size_t k = 0; k < 5; ++k) CHECK(e[k] == (j == k ? 1.0 : 0.0));
  }
  // Lagrange basis reproduces polynomials up to degree p - 1.
  for (double t : {-0.93, -0.2, 0.0, 0.45, 1.0}) {
    const Vector u = g.basis(t);
    double one = 0.0;
    double quartic = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      one += u[k];
      quartic += u[k] * std::pow(g.nodes()[k], 4);
    }
    CHECK(one == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quartic == doctest::Approx(std::pow(t, 4)).epsilon(1e-13));
  }
}

TEST_CASE("fmm_order") {
  CHECK(fmm_order(1.0 / 95367431640625.0) == 20);
  CHECK(fmm_order(std::pow(5.0, -10)) == 10);
  CHECK(fmm_order(0.2) == 1);
  CHECK(fmm_order(0.19) == 2);
  CHECK(fmm_order(1e-10) == 15);
  CHECK_THROWS_AS(fmm_order(0.0), Error);
  CHECK_THROWS_AS(fmm_order(1.0), Error);
}

TEST_CASE("plan geometry") {
  const Instance in = random_instance(1000, 51);
  const FMMPlan plan = build_plan(in.x, in.y, std::pow(5.0, -10));
  CHECK(plan.p == 10);
  CHECK(plan.s == 20);
  CHECK(plan.nlevs == 6);  // 20 * 2^6 = 1280 >= 1000 > 640
  CHECK(plan.source_start.back() == 1000);
  for (std::size_t c = 0; c < plan.leaf_count(); ++c) {
    for (std::size_t q = plan.source_start[c]; q < plan.source_start[c + 1]; ++q) {
      const double t = plan.normalize(in.x[plan.source_index[q]]);
      CHECK(std::abs(t - plan.cell_center(plan.nlevs, c)) <= plan.cell_radius(plan.nlevs) * (1 + 1e-12));
    }
  }
  CHECK(build_plan(Vector{1.0, 2.0}, Vector{1.5}, 0.01).nlevs == 0);
  CHECK_THROWS_AS(build_plan(Vector{}, Vector{1.0}, 0.01), Error);
  CHECK_THROWS_AS(build_plan(Vector{1.0, 2.0}, Vector{2.0}, 0.01), Error);
}

TEST_CASE("upward pass reproduces directly computed far fields") {
  const Instance in = random_instance(2000, 52);
  const FMMPlan plan = build_plan(in.x, in.y, 1.0 / 95367431640625.0);
  REQUIRE(plan.nlevs >= 4);
  const ExpansionSet e = upward_pass(plan, leaf_far_field(plan, in.alpha));
  const auto nodes = plan.grid.nodes();
  for (std::size_t level = 2; level <= plan.nlevs; ++level) {
    const double r = plan.cell_radius(level);
    for (std::size_t c = 0; c < FMMPlan::cell_count(level); c += 3) {
      Vector ref(plan.p, 0.0);
      for (std::size_t k = 0; k < in.x.size(); ++k) {
        if (cell_of(plan, plan.nlevs, in.x[k]) >> (plan.nlevs - level) != c) continue;
        const double d = plan.normalize(in.x[k]) - plan.cell_center(level, c);
        for (std::size_t m = 0; m < plan.p; ++m) ref[m] += in.alpha[k] * nodes[m] / (3 * r - nodes[m] * d);
      }
      const auto got = e.far(level, c, plan.p);
      double scale = 1e-300;
      for (double v : ref) scale = std::max(scale, std::abs(v));
      CHECK(max_abs_diff(got, ref) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("downward pass matches the far-field sum at leaf nodes") {
  const Instance in = random_instance(2000, 53);
  const FMMPlan plan = build_plan(in.x, in.y, 1.0 / 95367431640625.0);
  const ExpansionSet e = downward_pass(plan, upward_pass(plan, leaf_far_field(plan, in.alpha)));
  const double r = plan.cell_radius(plan.nlevs);
  for (std::size_t c = 0; c < plan.leaf_count(); c += 5) {
    const auto psi = e.local(plan.nlevs, c, plan.p);
    for (std::size_t m = 0; m < plan.p; ++m) {
      const double y = plan.cell_center(plan.nlevs, c) + r * plan.grid.nodes()[m];
      double ref = 0.0;
      double mag = 0.0;
      for (std::size_t k = 0; k < in.x.size(); ++k) {
        const std::size_t sc = cell_of(plan, plan.nlevs, in.x[k]);
        if (sc + 1 >= c && sc <= c + 1) continue;
        const double term = in.alpha[k] / (y - plan.normalize(in.x[k]));
        ref += term;
        mag += std::abs(term);
      }
      CHECK(std::abs(psi[m] - ref) <= 1e-12 * mag);
    }
  }
}

TEST_CASE("fmm_evaluate matches direct summation") {
  for (std::size_t n : {3u, 40u, 100u, 1000u, 5000u}) {
    const Instance in = random_instance(n, 54 + n);
    for (std::size_t p : {5u, 10u, 20u}) {
      const FMMPlan plan = build_plan(in.x, in.y, std::pow(5.0, -static_cast<double>(p)));
      CHECK(rel_diff(fmm_evaluate(plan, in.alpha), direct(in)) <= 10.0 * std::pow(5.0, -static_cast<double>(p)));
    }
  }
}

TEST_CASE("fmm handles targets outside the source range and M != N") {
  Rng rng(55);
  Vector x = random_vector(700, 0.0, 1.0, rng);
  Vector y = random_vector(300, -0.5, 1.5, rng);
  const Vector u = random_vector(700, -1, 1, rng);
  DenseMatrix row(1, 700, u);
  const DenseMatrix got = fmm_matvec(x, y, row, 1.0 / 95367431640625.0);
  const Vector ref = cauchy_matvec_naive(x, y, u);
  CHECK(rel_diff(got.row(0), ref) <= 1e-10);
}

TEST_CASE("fmm_matvec is independent of the thread count") {
  const Instance in = random_instance(800, 56);
  Rng rng(57);
  const DenseMatrix u = random_matrix(9, 800, -1, 1, rng);
  CHECK(fmm_matvec(in.x, in.y, u, 1e-12, 1) == fmm_matvec(in.x, in.y, u, 1e-12, 3));
}

TEST_CASE("fmm accuracy improves with p") {
  const Instance in = random_instance(1024, 58);
  double prev = 1.0;
  for (std::size_t p = 2; p <= 20; p += 2) {
    const FMMPlan plan = build_plan(in.x, in.y, std::pow(5.0, -static_cast<double>(p)));
    const double err = rel_diff(fmm_evaluate(plan, in.alpha), direct(in));
    CHECK(err <= prev * 1.01 + 1e-15);
    prev = err;
  }
}
