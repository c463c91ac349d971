#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "svdstream/cauchy.hpp"
#include "svdstream/errors.hpp"
#include "svdstream/fast.hpp"
#include "svdstream/fmm.hpp"
#include "svdstream/oracle.hpp"
#include "svdstream/secular.hpp"
#include "svdstream/svd_update.hpp"

namespace py = pybind11;
using namespace svdstream;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorKind::DimensionMismatch, "expected a 1-D array");
  return Vector(a.data(), a.data() + a.size());
}

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 2-D array");
  const auto r = static_cast<std::size_t>(a.shape(0));
  const auto c = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(r, c, Vector(a.data(), a.data() + a.size()));
}

py::array_t<double> from_vector(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<double> from_matrix(const DenseMatrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(double));
  return out;
}

BackendChoice backend_from(const std::string& name, double epsilon, std::size_t threads) {
  BackendChoice b;
  b.kind = parse_backend(name);
  b.epsilon = epsilon;
  b.threads = threads;
  return b;
}

SVDFactors factors_from(const Array& U, const Array& s, const Array& V) {
  SVDFactors f;
  f.U = to_matrix(U);
  f.V = to_matrix(V);
  f.S = DiagRect(f.U.rows(), f.V.rows(), to_vector(s));
  return f;
}

py::tuple factors_to(const SVDFactors& f) {
  return py::make_tuple(from_matrix(f.U), from_vector(f.S.diag), from_matrix(f.V));
}

constexpr double kDefaultEps = 1.0 / 95367431640625.0;

}  // namespace

PYBIND11_MODULE(_svdstream, m) {
  m.doc() = "Rank-one SVD updates with naive, FAST and FMM Cauchy backends";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("fmm_order", &fmm_order, py::arg("epsilon"));

  m.def(
      "solve_secular",
      [](const Array& d, const Array& z, double rho) {
        const SecularRoots r = solve_secular({to_vector(d), to_vector(z), rho});
        return py::make_tuple(from_vector(r.mu), from_vector(r.residuals));
      },
      py::arg("d"), py::arg("z"), py::arg("rho"),
      "Roots of 1 + rho * sum z_i^2 / (d_i - mu) for strictly ascending d and nonzero z.");

  m.def(
      "deflate",
      [](const Array& d, const Array& z, double rho) {
        const DeflationResult r = deflate({to_vector(d), to_vector(z), rho});
        Vector deflated;
        for (const auto& e : r.bookkeeping.deflated_eigs) deflated.push_back(e.eigenvalue);
        py::dict out;
        out["d"] = from_vector(r.reduced.d);
        out["z"] = from_vector(r.reduced.z);
        out["deflated"] = from_vector(deflated);
        out["permutation"] = r.bookkeeping.permutation;
        out["active"] = r.bookkeeping.active;
        return out;
      },
      py::arg("d"), py::arg("z"), py::arg("rho"));

  m.def(
      "cauchy_matvec_naive",
      [](const Array& lambda, const Array& mu, const Array& u) {
        return from_vector(cauchy_matvec_naive(to_vector(lambda), to_vector(mu), to_vector(u)));
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("u"));

  m.def(
      "fast_matvec",
      [](const Array& lambda, const Array& mu, const Array& u) {
        return from_vector(fast_matvec(to_vector(lambda), to_vector(mu), to_vector(u)));
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("u"));

  m.def(
      "fmm_matvec",
      [](const Array& lambda, const Array& mu, const Array& u, double epsilon) {
        const Vector uv = to_vector(u);
        const DenseMatrix out = fmm_matvec(to_vector(lambda), to_vector(mu), DenseMatrix(1, uv.size(), uv), epsilon);
        return from_vector(out.data());
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("u"), py::arg("epsilon") = kDefaultEps);

  m.def(
      "rank_one_sym_update",
      [](const Array& U, const Array& D, const Array& a1, double rho, const std::string& backend, double epsilon) {
        const SymEigenUpdate r =
            rank_one_sym_update(to_matrix(U), to_vector(D), to_vector(a1), rho, backend_from(backend, epsilon, 1));
        return py::make_tuple(from_matrix(r.U), from_vector(r.D));
      },
      py::arg("U"), py::arg("D"), py::arg("a1"), py::arg("rho"), py::arg("backend") = "fmm",
      py::arg("epsilon") = kDefaultEps,
      "Eigendecomposition of U diag(D) U^T + rho a1 a1^T, eigenvalues ascending.");

  m.def(
      "jacobi_svd",
      [](const Array& A) { return factors_to(jacobi_svd(to_matrix(A))); }, py::arg("A"),
      "Full SVD (U, s, V) with s descending.");

  m.def(
      "update_svd",
      [](const Array& A, const Array& U, const Array& s, const Array& V, const Array& a, const Array& b,
         const std::string& backend, double epsilon, std::size_t threads) {
        const UpdateResult r = update_svd(to_matrix(A), factors_from(U, s, V), to_vector(a), to_vector(b),
                                          backend_from(backend, epsilon, threads));
        py::dict report;
        report["error"] = r.report.error;
        report["orth_u"] = r.report.orth_u;
        report["orth_v"] = r.report.orth_v;
        report["sigma_consistency"] = r.report.sigma_consistency;
        report["negative_clamped"] = r.report.negative_clamped;
        report["total_ns"] = r.report.timings.total_ns;
        const py::tuple f = factors_to(r.factors);
        return py::make_tuple(f[0], f[1], f[2], report);
      },
      py::arg("A"), py::arg("U"), py::arg("s"), py::arg("V"), py::arg("a"), py::arg("b"),
      py::arg("backend") = "fmm", py::arg("epsilon") = kDefaultEps, py::arg("threads") = 1,
      "SVD of A + a b^T from the SVD (U, s, V) of A. Returns (U, s, V, report).");

  m.def(
      "reconstruction_error",
      [](const Array& A, const Array& U, const Array& s, const Array& V) {
        return reconstruction_error(to_matrix(A), factors_from(U, s, V));
      },
      py::arg("A"), py::arg("U"), py::arg("s"), py::arg("V"));
}
