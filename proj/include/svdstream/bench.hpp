#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "svdstream/cauchy.hpp"
#include "svdstream/linalg.hpp"
#include "svdstream/svd_update.hpp"

namespace svdstream {

/// Uniform doubles from a 64-bit Mersenne Twister: lo + (hi - lo) * (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Independent stream per (seed, size, repeat) through std::seed_seq.
  Rng(std::uint64_t seed, std::uint64_t size, std::uint64_t repeat);

  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);
Vector random_vector(std::size_t n, double lo, double hi, Rng& rng);

/// Ascending poles and strictly interlaced nodes: lambda_i < mu_i < lambda_{i+1}.
void random_interlaced(std::size_t n, Rng& rng, Vector& lambda, Vector& mu);

enum class Workload {
  Svd,    // full update of a random n x n matrix
  Eigen,  // one rank-one eigen-update of size n, Cauchy product for one probe row
};
Workload parse_workload(std::string_view name);

struct BenchRecord {
  std::size_t n = 0;
  std::size_t m = 0;
  Backend backend = Backend::Naive;
  std::size_t p = 0;  // expansion order, 0 for non-FMM backends
  PhaseTimes timings;
  double error = 0.0;
  double orth_u = 0.0;
  double orth_v = 0.0;
  double sigma_consistency = 0.0;
};

std::string csv_header();
std::string csv_row(const BenchRecord& r);

/// Entries of A, a, b uniform in [1, 9]. The initial SVD is not timed.
BenchRecord run_svd_trial(std::size_t n, const BackendChoice& backend, std::uint64_t seed,
                          std::size_t repeat);

/// D ascending uniform in [1, 9], z uniform in [1, 9] scaled to unit norm, rho = 1.
/// error is the probe row's normwise relative difference to the naive backend;
/// the orthogonality and consistency columns are NaN.
BenchRecord run_eigen_trial(std::size_t n, const BackendChoice& backend, std::uint64_t seed,
                            std::size_t repeat);

struct VerifyCheck {
  std::string name;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_defect <= tolerance; }
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  std::string first_error;  // message of the first exception raised, if any
  bool pass() const;
  const VerifyCheck* first_failure() const;
};

/// Random instances of size n checked against the dense oracles: secular eigenvalues,
/// interlacing, trace, backend matvec, reconstruction, orthogonality, consistency,
/// singular values.
VerifyResult run_verify(std::size_t n, std::size_t trials, const BackendChoice& backend,
                        std::uint64_t seed);

}  // namespace svdstream
