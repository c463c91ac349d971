#include "svdstream/matrix_io.hpp"

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "svdstream/errors.hpp"

namespace svdstream {
namespace {

std::size_t parse_dim(const std::string& tok, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::ParseError, std::string("bad ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  os << kMatrixMagic << ' ' << kMatrixVersion << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

void write_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  write_matrix(os, m);
  if (!os) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

DenseMatrix read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::ParseError, "missing header");
  std::istringstream hs(line);
  std::string magic, version, rows, cols, extra;
  hs >> magic >> version >> rows >> cols;
  if (magic != kMatrixMagic || version != kMatrixVersion || cols.empty() || (hs >> extra)) {
    throw Error(ErrorKind::ParseError, "bad header '" + line + "'");
  }
  const std::size_t r = parse_dim(rows, "row count");
  const std::size_t c = parse_dim(cols, "column count");
  Vector data(r * c);
  std::string tok;
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!(is >> tok)) {
      throw Error(ErrorKind::ParseError, "expected " + std::to_string(data.size()) + " values, found " + std::to_string(k));
    }
    // strtod accepts the forms %.17g writes, including inf and nan.
    char* end = nullptr;
    data[k] = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw Error(ErrorKind::ParseError, "bad value '" + tok + "'");
  }
  if (is >> tok) throw Error(ErrorKind::ParseError, "trailing data '" + tok + "'");
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  try {
    return read_matrix(is);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseError) throw;
    const std::string msg = e.what();
    const std::size_t prefix = to_string(ErrorKind::ParseError).size() + 2;
    throw Error(ErrorKind::ParseError, path + ": " + msg.substr(prefix));
  }
}

Vector read_vector(const std::string& path) {
  const DenseMatrix m = read_matrix(path);
  if (m.rows() != 1 && m.cols() != 1) {
    throw Error(ErrorKind::ParseError, path + ": expected a single row or column");
  }
  return Vector(m.data().begin(), m.data().end());
}

}  // namespace svdstream
