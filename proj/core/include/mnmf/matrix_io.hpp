#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mnmf/linalg.hpp"
#include "mnmf/omf.hpp"

namespace mnmf {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Plain-text matrix: a "rows cols" header line followed by one line per row
/// of space-separated values.
void write_matrix(std::ostream& os, const Matrix& m);
/// Throws DataError naming the offending line. `line` tracks the 1-based line
/// number across consecutive reads from the same stream.
Matrix read_matrix(std::istream& is, std::size_t& line);
Matrix read_matrix(std::istream& is);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

struct Checkpoint {
  AggregateStats stats;
  double beta = 1.0;
};

/// A, then B, then a trailer "t r_scalar kappa1 beta".
void write_checkpoint(std::ostream& os, const AggregateStats& stats, double beta);
Checkpoint read_checkpoint(std::istream& is);

}  // namespace mnmf
