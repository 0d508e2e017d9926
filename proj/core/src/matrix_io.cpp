#include "mnmf/matrix_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mnmf/error.hpp"

namespace mnmf {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

bool next_line(std::istream& is, std::string& out, std::size_t& line) {
  while (std::getline(is, out)) {
    ++line;
    if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(line, "cannot parse number '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, std::size_t& line) {
  std::string s;
  if (!next_line(is, s, line)) fail(line, "missing matrix header");
  const auto head = tokens(s);
  if (head.size() != 2) fail(line, "matrix header must be 'rows cols'");
  const double rows = parse_double(head[0], line);
  const double cols = parse_double(head[1], line);
  if (rows < 0 || cols < 0 || rows != static_cast<long>(rows) || cols != static_cast<long>(cols)) {
    fail(line, "matrix dimensions must be nonnegative integers");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!next_line(is, s, line)) fail(line, "unexpected end of matrix data");
    const auto row = tokens(s);
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      fail(line, "expected " + std::to_string(m.cols()) + " values, found " +
                     std::to_string(row.size()));
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = parse_double(row[j], line);
  }
  return m;
}

Matrix read_matrix(std::istream& is) {
  std::size_t line = 0;
  return read_matrix(is, line);
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  write_matrix(os, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  try {
    return read_matrix(is);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_checkpoint(std::ostream& os, const AggregateStats& stats, double beta) {
  write_matrix(os, stats.A);
  write_matrix(os, stats.B);
  os << stats.t << ' ' << format_double(stats.remainder) << ' ' << format_double(stats.kappa1)
     << ' ' << format_double(beta) << '\n';
}

Checkpoint read_checkpoint(std::istream& is) {
  std::size_t line = 0;
  Checkpoint cp;
  cp.stats.A = read_matrix(is, line);
  cp.stats.B = read_matrix(is, line);
  if (cp.stats.A.rows() != cp.stats.A.cols() || cp.stats.B.rows() != cp.stats.A.rows()) {
    fail(line, "aggregate shapes are inconsistent");
  }
  std::string s;
  if (!next_line(is, s, line)) fail(line, "missing checkpoint trailer");
  const auto tail = tokens(s);
  if (tail.size() != 4) fail(line, "trailer must be 't r_scalar kappa1 beta'");
  const double t = parse_double(tail[0], line);
  if (t < 0 || t != static_cast<double>(static_cast<std::size_t>(t))) fail(line, "bad step counter");
  cp.stats.t = static_cast<std::size_t>(t);
  cp.stats.remainder = parse_double(tail[1], line);
  cp.stats.kappa1 = parse_double(tail[2], line);
  cp.beta = parse_double(tail[3], line);
  return cp;
}

}  // namespace mnmf
