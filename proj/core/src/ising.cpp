#include "mnmf/ising.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mnmf {

IsingConfig::IsingConfig(int n, double temperature, std::int8_t fill)
    : n_(n), temperature_(temperature) {
  if (n <= 0) throw std::invalid_argument("lattice size must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (fill != 1 && fill != -1) throw std::invalid_argument("spins take values ±1");
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  spins_.assign(count, fill);
  neighbors_.resize(count);
  degree_.assign(count, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t site = index(r, c);
      const std::array<std::size_t, 4> cand = {index(r - 1, c), index(r + 1, c),
                                               index(r, c - 1), index(r, c + 1)};
      for (std::size_t u : cand) {
        if (u == site) continue;
        auto& nb = neighbors_[site];
        auto end = nb.begin() + degree_[site];
        if (std::find(nb.begin(), end, u) != end) continue;
        nb[degree_[site]++] = static_cast<std::uint32_t>(u);
      }
    }
  }
}

IsingConfig IsingConfig::random(int n, double temperature, Rng& rng) {
  IsingConfig cfg(n, temperature);
  for (std::size_t i = 0; i < cfg.sites(); ++i) cfg.spins_[i] = (rng() >> 63) ? 1 : -1;
  return cfg;
}

std::size_t IsingConfig::index(int row, int col) const {
  const int r = ((row % n_) + n_) % n_;
  const int c = ((col % n_) + n_) % n_;
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
}

void IsingConfig::set(std::size_t site, int value) {
  if (value != 1 && value != -1) throw std::invalid_argument("spins take values ±1");
  spins_.at(site) = static_cast<std::int8_t>(value);
}

int IsingConfig::neighbor_sum(std::size_t site) const {
  int s = 0;
  for (std::uint8_t i = 0; i < degree_[site]; ++i) s += spins_[neighbors_[site][i]];
  return s;
}

double plus_probability(int neighbor_sum, double temperature) {
  return 1.0 / (1.0 + std::exp(-2.0 * neighbor_sum / temperature));
}

void gibbs_step(IsingConfig& config, Rng& rng) {
  const std::size_t site = uniform_index(rng, config.sites());
  const double p = plus_probability(config.neighbor_sum(site), config.temperature());
  config.set(site, uniform01(rng) < p ? 1 : -1);
}

std::size_t config_index(const IsingConfig& config) {
  if (config.sites() > 63) throw std::invalid_argument("config_index: lattice too large");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < config.sites(); ++i) {
    if (config.spin(i) > 0) idx |= std::size_t{1} << i;
  }
  return idx;
}

std::vector<double> boltzmann_distribution(int n, double temperature) {
  if (n <= 0 || n * n > 20) throw std::invalid_argument("boltzmann_distribution: need 1 <= n² <= 20");
  IsingConfig cfg(n, temperature);
  const std::size_t sites = cfg.sites();
  const std::size_t states = std::size_t{1} << sites;
  std::vector<double> log_weight(states);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < sites; ++i) cfg.set(i, (s >> i) & 1 ? 1 : -1);
    // Each edge is seen from both endpoints.
    double interaction = 0.0;
    for (std::size_t i = 0; i < sites; ++i) interaction += cfg.spin(i) * cfg.neighbor_sum(i);
    log_weight[s] = 0.5 * interaction / temperature;
  }
  const double top = *std::max_element(log_weight.begin(), log_weight.end());
  double z = 0.0;
  for (double& w : log_weight) z += (w = std::exp(w - top));
  for (double& w : log_weight) w /= z;
  return log_weight;
}

Matrix spin_patch_minibatch(const IsingConfig& config, int k, int count, Rng& rng) {
  if (k <= 0 || k > config.size()) {
    throw std::invalid_argument("patch size " + std::to_string(k) + " does not fit a " +
                                std::to_string(config.size()) + "x" + std::to_string(config.size()) +
                                " lattice");
  }
  if (count <= 0) throw std::invalid_argument("patch count must be positive");
  const auto n = static_cast<std::size_t>(config.size());
  Matrix X(k * k, count);
  for (int col = 0; col < count; ++col) {
    const int r0 = static_cast<int>(uniform_index(rng, n));
    const int c0 = static_cast<int>(uniform_index(rng, n));
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) X(a * k + b, col) = 0.5 * (config.spin(r0 + a, c0 + b) + 1);
    }
  }
  return X;
}

}  // namespace mnmf
