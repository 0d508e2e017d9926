#include "run_output.hpp"

#include <fstream>
#include <sstream>

#include "mnmf/error.hpp"
#include "mnmf/matrix_io.hpp"

namespace mnmf::cli {

void RunMeta::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void RunMeta::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void RunMeta::set(std::string key, std::size_t value) { set(std::move(key), std::to_string(value)); }

void RunMeta::write(const std::filesystem::path& path) const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << ": " << v << '\n';
  write_text(path, out.str());
}

std::filesystem::path prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace) {
  std::ostringstream out;
  out << "t,surrogate\n";
  for (std::size_t t = 0; t < trace.size(); ++t) out << t + 1 << ',' << format_double(trace[t]) << '\n';
  write_text(path, out.str());
}

void write_dominance(const std::filesystem::path& path, const Vector& dominance) {
  std::ostringstream out;
  out << "atom,dominance\n";
  for (Eigen::Index i = 0; i < dominance.size(); ++i) {
    out << i + 1 << ',' << format_double(dominance(i)) << '\n';
  }
  write_text(path, out.str());
}

}  // namespace mnmf::cli
