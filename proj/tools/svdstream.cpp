#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "svdstream/bench.hpp"
#include "svdstream/errors.hpp"
#include "svdstream/fmm.hpp"
#include "svdstream/matrix_io.hpp"
#include "svdstream/oracle.hpp"
#include "svdstream/svd_update.hpp"

namespace {

using namespace svdstream;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

// Error raised while running one named phase of a command.
struct PhaseError {
  std::string phase;
  Error error;
};

template <class Fn>
auto in_phase(const std::string& phase, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw PhaseError{phase, e};
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument: return kExitUsage;
    default: return kExitNumeric;
  }
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("SVDSTREAM_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidArgument, std::string("SVDSTREAM_SEED is not an integer: '") + env + "'");
  }
  return 1;
}

BackendChoice make_backend(const std::string& name, double epsilon, std::size_t threads) {
  BackendChoice b;
  b.kind = parse_backend(name);
  b.epsilon = epsilon;
  b.threads = threads;
  if (b.kind == Backend::Fmm) fmm_order(epsilon);  // rejects epsilon outside (0, 1)
  return b;
}

struct GenArgs {
  std::size_t rows = 0, cols = 0;
  double lo = 0.0, hi = 1.0;
  std::uint64_t seed = 1;
  std::string out = "-";
};

int cmd_gen(const GenArgs& g, const CLI::Option* seed_opt) {
  if (g.rows < 1 || g.cols < 1) throw Error(ErrorKind::InvalidArgument, "rows and cols must be >= 1");
  if (!(g.lo < g.hi)) throw Error(ErrorKind::InvalidArgument, "need lo < hi");
  Rng rng(resolve_seed(seed_opt, g.seed));
  const DenseMatrix m = random_matrix(g.rows, g.cols, g.lo, g.hi, rng);
  in_phase("write", [&] {
    if (g.out == "-") {
      write_matrix(std::cout, m);
    } else {
      write_matrix(g.out, m);
    }
    return 0;
  });
  return kExitOk;
}

struct UpdateArgs {
  std::string matrix, a, b;
  std::string backend = "fmm";
  double epsilon = BackendChoice{}.epsilon;
  std::string out;
  std::size_t threads = 1;
};

int cmd_update(const UpdateArgs& u) {
  const BackendChoice backend = make_backend(u.backend, u.epsilon, u.threads);
  const DenseMatrix A = in_phase("read", [&] { return read_matrix(u.matrix); });
  const Vector a = in_phase("read", [&] { return read_vector(u.a); });
  const Vector b = in_phase("read", [&] { return read_vector(u.b); });
  if (a.size() != A.rows() || b.size() != A.cols()) {
    throw PhaseError{"read", Error(ErrorKind::DimensionMismatch, "a must have rows(A) entries and b cols(A)")};
  }
  const SVDFactors svd = in_phase("initial-svd", [&] { return jacobi_svd(A); });
  const UpdateResult res = in_phase("update", [&] { return update_svd(A, svd, a, b, backend); });
  if (!u.out.empty()) {
    in_phase("write", [&] {
      write_matrix(u.out + "_U.txt", res.factors.U);
      write_matrix(u.out + "_S.txt", res.factors.S.dense());
      write_matrix(u.out + "_V.txt", res.factors.V);
      return 0;
    });
  }
  BenchRecord rec;
  rec.n = A.cols();
  rec.m = A.rows();
  rec.backend = backend.kind;
  rec.p = backend.kind == Backend::Fmm ? fmm_order(backend.epsilon) : 0;
  rec.timings = res.report.timings;
  rec.error = res.report.error;
  rec.orth_u = res.report.orth_u;
  rec.orth_v = res.report.orth_v;
  rec.sigma_consistency = res.report.sigma_consistency;
  std::cout << csv_header() << '\n' << csv_row(rec) << '\n';
  if (res.report.negative_clamped) std::cerr << "svdstream: warning: negative eigenvalue clamped to zero\n";
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> sizes;
  std::vector<std::string> backends{"naive", "fmm"};
  std::size_t repeat = 1;
  std::uint64_t seed = 1;
  double epsilon = BackendChoice{}.epsilon;
  std::string workload = "svd";
  std::size_t threads = 1;
};

int cmd_bench(const BenchArgs& bargs, const CLI::Option* seed_opt) {
  const std::uint64_t seed = resolve_seed(seed_opt, bargs.seed);
  const Workload workload = parse_workload(bargs.workload);
  for (std::size_t n : bargs.sizes) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "sizes must be >= 2");
  }
  std::vector<BackendChoice> backends;
  for (const auto& name : bargs.backends) backends.push_back(make_backend(name, bargs.epsilon, bargs.threads));

  std::cout << csv_header() << '\n' << std::flush;
  for (std::size_t n : bargs.sizes) {
    for (const BackendChoice& b : backends) {
      for (std::size_t r = 0; r < bargs.repeat; ++r) {
        const BenchRecord rec = in_phase("bench n=" + std::to_string(n) + " backend=" + std::string(to_string(b.kind)), [&] {
          return workload == Workload::Svd ? run_svd_trial(n, b, seed, r) : run_eigen_trial(n, b, seed, r);
        });
        std::cout << csv_row(rec) << '\n' << std::flush;
      }
    }
  }
  return kExitOk;
}

struct VerifyArgs {
  std::size_t n = 8;
  std::size_t trials = 20;
  std::string backend = "fmm";
  double epsilon = BackendChoice{}.epsilon;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

int cmd_verify(const VerifyArgs& v, const CLI::Option* seed_opt) {
  if (v.n < 2) throw Error(ErrorKind::InvalidArgument, "--n must be >= 2");
  const BackendChoice backend = make_backend(v.backend, v.epsilon, v.threads);
  const VerifyResult res = run_verify(v.n, v.trials, backend, resolve_seed(seed_opt, v.seed));
  std::printf("invariant,max_defect,tolerance,status\n");
  for (const auto& c : res.checks) {
    std::printf("%s,%.3e,%.3e,%s\n", c.name.c_str(), c.max_defect, c.tolerance, c.pass() ? "PASS" : "FAIL");
  }
  if (res.pass()) {
    std::printf("verify: PASS\n");
    return kExitOk;
  }
  const VerifyCheck* f = res.first_failure();
  std::printf("verify: FAIL %s\n", f ? f->name.c_str() : "error");
  if (!res.first_error.empty()) std::fprintf(stderr, "svdstream: verify: %s\n", res.first_error.c_str());
  return kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one SVD updates with Cauchy-structured eigenvector products"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a random matrix with uniform entries in [lo, hi)");
  gen_cmd->add_option("rows", gen.rows)->required();
  gen_cmd->add_option("cols", gen.cols)->required();
  gen_cmd->add_option("lo", gen.lo)->required();
  gen_cmd->add_option("hi", gen.hi)->required();
  auto* gen_seed = gen_cmd->add_option("--seed", gen.seed, "PRNG seed (default $SVDSTREAM_SEED, then 1)");
  gen_cmd->add_option("-o,--out", gen.out, "Output path, - for stdout")->capture_default_str();

  UpdateArgs upd;
  auto* upd_cmd = app.add_subcommand("update", "SVD of A + a b^T; prints one CSV record");
  upd_cmd->add_option("matrix", upd.matrix)->required();
  upd_cmd->add_option("a", upd.a)->required();
  upd_cmd->add_option("b", upd.b)->required();
  upd_cmd->add_option("--backend", upd.backend)->check(CLI::IsMember({"naive", "fast", "fmm"}))->capture_default_str();
  upd_cmd->add_option("--epsilon", upd.epsilon, "FMM precision; order p = ceil(log5(1/epsilon))");
  upd_cmd->add_option("-o,--out", upd.out, "Write <out>_U.txt, <out>_S.txt, <out>_V.txt");
  upd_cmd->add_option("--threads", upd.threads)->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Timing and accuracy CSV, one row per trial");
  bench_cmd->add_option("--sizes", bench.sizes)->delimiter(',')->required();
  bench_cmd->add_option("--backends", bench.backends)->delimiter(',')->check(CLI::IsMember({"naive", "fast", "fmm"}));
  bench_cmd->add_option("--repeat", bench.repeat)->capture_default_str();
  auto* bench_seed = bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--epsilon", bench.epsilon);
  bench_cmd->add_option("--workload", bench.workload)->check(CLI::IsMember({"svd", "eigen"}))->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads)->check(CLI::PositiveNumber);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Check invariants on random instances against dense oracles");
  ver_cmd->add_option("--n", ver.n)->capture_default_str();
  ver_cmd->add_option("--trials", ver.trials)->capture_default_str();
  ver_cmd->add_option("--backend", ver.backend)->check(CLI::IsMember({"naive", "fast", "fmm"}))->capture_default_str();
  ver_cmd->add_option("--epsilon", ver.epsilon);
  auto* ver_seed = ver_cmd->add_option("--seed", ver.seed);
  ver_cmd->add_option("--threads", ver.threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, gen_seed);
    if (*upd_cmd) return cmd_update(upd);
    if (*bench_cmd) return cmd_bench(bench, bench_seed);
    if (*ver_cmd) return cmd_verify(ver, ver_seed);
  } catch (const PhaseError& e) {
    std::cerr << "svdstream: " << e.phase << ": " << e.error.what() << '\n';
    return exit_code_for(e.error.kind());
  } catch (const Error& e) {
    std::cerr << "svdstream: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kExitUsage;
}
