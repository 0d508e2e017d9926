#pragma once

// Network dictionary learning and network reconstruction from mesoscale
// patches sampled along a motif chain.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "mnmf/linalg.hpp"
#include "mnmf/motif.hpp"
#include "mnmf/network.hpp"
#include "mnmf/omf.hpp"

namespace mnmf {

struct NdlParams {
  std::size_t k = 21;           // motif size (k-chain)
  std::size_t iterations = 100; // T
  std::size_t batch = 100;      // N homomorphisms per minibatch
  std::size_t atoms = 25;       // r
  double lambda = 1.0;
  double dict_radius = 1000.0;
  McmcKind mcmc = McmcKind::pivot;
  double beta = 1.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double coding_tol = 1e-6;
  int coding_max_iter = 200;
  DictionaryOptions dictionary;

  void validate() const;
  CodingOptions coding() const;
};

struct NetworkDictionary {
  Matrix W;                              // k² x r
  Matrix P;                              // r x r aggregate
  Matrix Q;                              // r x k² aggregate
  Vector dominance;
  std::vector<double> surrogate_trace;   // f̂_t(W_t), t = 1..T
  double residual = 0.0;                 // ||X_T − W_T H||²_F / N on the last minibatch
  AggregateStats stats;
};

/// Runs T rounds of (N chain steps -> k² x N patch matrix -> one online
/// factorization step). The chain is driven by derive_seed(seed, 0) and the
/// initial dictionary by derive_seed(seed, 1), so runs differing only in r
/// see the same patch stream.
NetworkDictionary ndl_learn(const Network& g, const NdlParams& params, std::uint64_t seed);

/// s_i = sqrt(P_ii) / Σ_j sqrt(P_jj). Throws NumericalError("degenerate
/// aggregates") when the diagonal vanishes.
Vector dominance_scores(const Matrix& P);

/// Running means of proposed values at ordered node pairs.
class ReconstructionState {
 public:
  struct Entry {
    double value = 0.0;
    std::size_t count = 0;
  };

  /// value <- (1 − 1/j) value + (1/j) proposal with j the new count.
  void fold(std::size_t a, std::size_t b, double proposal);
  /// Stored mean, or nullptr when the pair was never visited.
  const Entry* find(std::size_t a, std::size_t b) const;
  const std::map<std::pair<std::size_t, std::size_t>, Entry>& entries() const { return entries_; }

 private:
  std::map<std::pair<std::size_t, std::size_t>, Entry> entries_;
};

struct NrParams {
  std::size_t iterations = 1000;
  double lambda = 1.0;
  McmcKind mcmc = McmcKind::pivot;
  double coding_tol = 1e-6;
  int coding_max_iter = 200;
};

/// Moves a k-chain along G for T steps (k = sqrt(rows of W)), codes each
/// patch against W and folds the k x k local reconstruction into the
/// running means at (x(a), x(b)). The chain uses derive_seed(seed, 2).
ReconstructionState nr_reconstruct(const Network& g, const Matrix& W, const NrParams& params,
                                   std::uint64_t seed);

/// Weighted network on g's nodes and labels with the stored means as weights.
Network reconstruction_network(const Network& g, const ReconstructionState& state);

/// "u v w" per visited ordered pair, 6 significant digits.
void write_reconstruction(std::ostream& out, const Network& g, const ReconstructionState& state);

}  // namespace mnmf
