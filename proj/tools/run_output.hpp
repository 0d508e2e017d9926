#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mnmf/linalg.hpp"

namespace mnmf::cli {

/// Ordered "key: value" metadata written next to every run's outputs. Holds
/// no timestamps or host details so reruns produce identical files.
class RunMeta {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::size_t value);
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Creates the directory (and parents) and returns it.
std::filesystem::path prepare_out_dir(const std::filesystem::path& dir);

/// Writes `text` to `path`, throwing DataError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// "t,surrogate" with t starting at 1.
void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace);

/// "atom,dominance" with atoms numbered from 1.
void write_dominance(const std::filesystem::path& path, const Vector& dominance);

}  // namespace mnmf::cli
