#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mnmf/linalg.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

/// Spin configuration on the n x n torus at temperature T. The lattice is
/// treated as a simple graph, so on the 2 x 2 torus each site has two
/// distinct neighbours rather than four.
class IsingConfig {
 public:
  IsingConfig(int n, double temperature, std::int8_t fill = 1);
  /// Independent fair ±1 spins.
  static IsingConfig random(int n, double temperature, Rng& rng);

  int size() const { return n_; }
  std::size_t sites() const { return spins_.size(); }
  double temperature() const { return temperature_; }

  int spin(int row, int col) const { return spins_[index(row, col)]; }
  int spin(std::size_t site) const { return spins_[site]; }
  void set(std::size_t site, int value);

  /// Sum of the spins adjacent to `site`.
  int neighbor_sum(std::size_t site) const;

  std::size_t index(int row, int col) const;

 private:
  int n_;
  double temperature_;
  std::vector<std::int8_t> spins_;
  std::vector<std::array<std::uint32_t, 4>> neighbors_;
  std::vector<std::uint8_t> degree_;
};

/// Heat-bath probability of setting a spin to +1 given neighbour sum S:
/// e^{S/T} / (e^{S/T} + e^{−S/T}).
double plus_probability(int neighbor_sum, double temperature);

/// Resamples one uniformly chosen site from its conditional law.
void gibbs_step(IsingConfig& config, Rng& rng);

/// Bit i of the index is set when site i carries spin +1.
std::size_t config_index(const IsingConfig& config);

/// Exact Boltzmann law over all 2^(n²) configurations, indexed as in
/// config_index. Requires n² <= 20.
std::vector<double> boltzmann_distribution(int n, double temperature);

/// k² x count matrix of k x k patches at uniform top-left corners (periodic
/// wrap), flattened row-major and mapped s -> (s + 1) / 2.
Matrix spin_patch_minibatch(const IsingConfig& config, int k, int count, Rng& rng);

}  // namespace mnmf
