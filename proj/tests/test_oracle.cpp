#include <doctest.h>

#include <cmath>

#include "svdstream/errors.hpp"
#include "svdstream/oracle.hpp"
#include "svdstream/svd_update.hpp"
#include "test_support.hpp"

using namespace svdstream;

TEST_CASE("jacobi_eigen") {
  const SymEigen e = jacobi_eigen(DenseMatrix::from_rows({{2, 1}, {1, 2}}));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(orthogonality_defect(e.vectors) <= 1e-15);

  Rng rng(81);
  DenseMatrix s = random_matrix(30, 30, -1, 1, rng);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
  }
  const SymEigen r = jacobi_eigen(s);
  CHECK(orthogonality_defect(r.vectors) <= 1e-13);
  for (std::size_t k = 0; k < 30; ++k) {
    const Vector v = r.vectors.column(k);
    const Vector sv = matvec(s, v);
    for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(sv[i] - r.values[k] * v[i]) <= 1e-13);
  }
  CHECK_THROWS_AS(jacobi_eigen(DenseMatrix(2, 3)), Error);
  CHECK_THROWS_AS(jacobi_eigen(DenseMatrix::from_rows({{1, 2}, {0, 1}})), Error);
}

TEST_CASE("jacobi_svd on wide, tall and rank-deficient matrices") {
  Rng rng(82);
  for (auto [m, n] : {std::pair{5, 9}, std::pair{9, 5}, std::pair{1, 4}, std::pair{6, 6}}) {
    const DenseMatrix A = random_matrix(m, n, -1, 1, rng);
    const SVDFactors f = jacobi_svd(A);
    CHECK(orthogonality_defect(f.U) <= 1e-14);
    CHECK(orthogonality_defect(f.V) <= 1e-14);
    CHECK(max_abs_diff(reconstruct(f), A) <= 1e-14);
    for (std::size_t k = 1; k < f.S.diag.size(); ++k) CHECK(f.S.diag[k - 1] >= f.S.diag[k]);
  }
  // Rank one: the completed singular vectors stay orthonormal.
  DenseMatrix r(4, 6);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 6; ++j) r(i, j) = static_cast<double>(i + 1) * static_cast<double>(j + 1);
  }
  const SVDFactors f = jacobi_svd(r);
  CHECK(orthogonality_defect(f.U) <= 1e-14);
  CHECK(orthogonality_defect(f.V) <= 1e-14);
  CHECK(f.S.diag[1] <= 1e-13 * f.S.diag[0]);
  CHECK(max_abs_diff(reconstruct(f), r) <= 1e-13);

  const SVDFactors z = jacobi_svd(DenseMatrix(3, 3));
  CHECK(orthogonality_defect(z.U) == 0.0);
  CHECK_THROWS_AS(jacobi_svd(DenseMatrix(0, 3)), Error);
}

TEST_CASE("largest_singular_value") {
  CHECK(largest_singular_value(DenseMatrix::from_rows({{3, 0}, {0, -4}})) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(largest_singular_value(DenseMatrix(2, 2)) == 0.0);
  Rng rng(83);
  const DenseMatrix A = random_matrix(20, 30, 1, 9, rng);
  CHECK(largest_singular_value(A) == doctest::Approx(jacobi_svd(A).S.diag[0]).epsilon(1e-10));
}
