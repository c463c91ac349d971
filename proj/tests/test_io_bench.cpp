#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "svdstream/bench.hpp"
#include "svdstream/errors.hpp"
#include "svdstream/matrix_io.hpp"

using namespace svdstream;

TEST_CASE("matrix file round trip is exact") {
  Rng rng(91);
  DenseMatrix m = random_matrix(3, 4, -1e5, 1e5, rng);
  m(0, 0) = 1.0 / 3.0;
  m(2, 3) = -0.0;
  std::stringstream ss;
  write_matrix(ss, m);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "svdstream-matrix v1 3 4");
  ss.seekg(0);
  CHECK(read_matrix(ss) == m);
}

TEST_CASE("matrix file errors") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_matrix(is);
  };
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse("svdstream-matrix v2 1 1\n1\n"), Error);
  CHECK_THROWS_AS(parse("svdstream-matrix v1 2 1\n1\n"), Error);
  CHECK_THROWS_AS(parse("svdstream-matrix v1 1 1\nabc\n"), Error);
  CHECK_THROWS_AS(parse("svdstream-matrix v1 1 1\n1 2\n"), Error);
  CHECK_THROWS_AS(parse("svdstream-matrix v1 x 1\n1\n"), Error);
  CHECK(parse("svdstream-matrix v1 1 2\n  1.5\n\n -2e3 \n")(0, 1) == -2000.0);
  try {
    read_matrix(std::string("/nonexistent/file.txt"));
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("CSV header matches the golden file") {
  std::ifstream is(SVDSTREAM_GOLDEN_DIR "/csv_header.txt");
  REQUIRE(is);
  std::string golden;
  std::getline(is, golden);
  CHECK(csv_header() == golden);
}

TEST_CASE("CSV row formatting") {
  BenchRecord r;
  r.n = 4;
  r.m = 3;
  r.backend = Backend::Fmm;
  r.p = 20;
  r.timings = {1, 2, 3, 7};
  r.error = 0.1;
  r.orth_u = 0.0;
  r.orth_v = 1e-300;
  r.sigma_consistency = std::nan("");
  CHECK(csv_row(r) == "4,3,fmm,20,1,2,3,7,0.10000000000000001,0,1e-300,nan");
}

TEST_CASE("Rng is deterministic and in range") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform(1, 9);
    CHECK(x == b.uniform(1, 9));
    CHECK(x >= 1.0);
    CHECK(x < 9.0);
  }
  Rng c(1, 16, 0);
  Rng d(1, 16, 1);
  CHECK(c.uniform(0, 1) != d.uniform(0, 1));
}

TEST_CASE("random_interlaced") {
  Rng rng(92);
  Vector lambda, mu;
  random_interlaced(50, rng, lambda, mu);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(lambda[i] < mu[i]);
    if (i + 1 < 50) CHECK(mu[i] < lambda[i + 1]);
  }
}

TEST_CASE("bench trials") {
  const BenchRecord s = run_svd_trial(12, BackendChoice::fmm(), 7, 0);
  CHECK(s.n == 12);
  CHECK(s.p == 20);
  CHECK(s.error <= 1e-6);
  CHECK(s.timings.total_ns > 0);
  const BenchRecord again = run_svd_trial(12, BackendChoice::fmm(), 7, 0);
  CHECK(s.error == again.error);
  CHECK(s.orth_u == again.orth_u);

  const BenchRecord e = run_eigen_trial(2000, BackendChoice::fmm(), 7, 0);
  CHECK(e.error <= 1e-10);
  CHECK(std::isnan(e.orth_u));
  CHECK(e.timings.secular_ns > 0);
  CHECK(run_eigen_trial(50, BackendChoice::naive(), 7, 0).error == 0.0);
  CHECK(parse_workload("eigen") == Workload::Eigen);
  CHECK_THROWS_AS(parse_workload("x"), Error);
}

TEST_CASE("verify suite") {
  CHECK(run_verify(8, 10, BackendChoice::naive(), 1).pass());
  CHECK(run_verify(8, 0, BackendChoice::fmm(), 1).pass());
  CHECK(run_verify(24, 5, BackendChoice::fmm(), 3).pass());
  const VerifyResult bad = run_verify(8, 5, BackendChoice::fmm(0.2), 1);
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.first_failure() != nullptr);
}
