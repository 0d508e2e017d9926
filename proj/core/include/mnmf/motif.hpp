#pragma once

// Motif sampling chains on weighted networks.
//
// A homomorphism x : [k] -> V of motif F = ([k], A_F) carries the weight
// ∏_{i,j} A(x(i), x(j))^{A_F(i,j)}; the target law π_{F→G} is proportional
// to it. For the k-chain (edges i -> i+1) the law factorizes through the
// row sums h_m = A^m 1, which the exact Pivot chain uses.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnmf/linalg.hpp"
#include "mnmf/network.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

struct Motif {
  Matrix adjacency;  // k x k, nonnegative

  std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }
  /// Directed path 1 -> 2 -> ... -> k.
  static Motif k_chain(std::size_t k);
  bool is_chain() const;
};

using Homomorphism = std::vector<std::size_t>;

double motif_weight(const Network& g, const Motif& f, const Homomorphism& x);

/// i.i.d. uniform proposals over V^k until one has positive weight.
/// Throws DataError("no homomorphism found") after max_tries proposals.
Homomorphism rejection_sample(const Network& g, const Motif& f, Rng& rng,
                              std::size_t max_tries = 1'000'000);

/// h_m = A^m 1 for m = 0..k−1, by repeated sparse products.
class PowerRowSums {
 public:
  PowerRowSums(const Network& g, std::size_t k);
  std::size_t order() const { return h_.size(); }
  /// Σ_c A^m(v, c).
  double operator()(std::size_t m, std::size_t v) const { return h_[m](static_cast<Eigen::Index>(v)); }
  const Vector& power(std::size_t m) const { return h_[m]; }

 private:
  std::vector<Vector> h_;
};

/// Exact draw from π_{F→G} for the k-chain with k = h.order(): x(1) ∝ h_{k−1},
/// then x(i) ∝ A(x(i−1), ·) h_{k−i}(·). Throws DataError("no homomorphism
/// found") when the network has no k-walk.
Homomorphism sample_chain_homomorphism(const Network& g, const PowerRowSums& h, Rng& rng);

/// Resamples the image of one uniformly chosen motif node from its exact
/// conditional law given the others.
void glauber_update(const Network& g, const Motif& f, Homomorphism& x, Rng& rng);

enum class PivotMode { exact, approximate };

/// Σ_c A(c, v) / Σ_c A(v, c); +∞ when v has no out-weight but some in-weight.
double in_out_ratio(const Network& g, std::size_t v);

/// Probability of accepting the pivot move x1 -> ell.
///   exact:       h(ell) A(ell,x1) out(x1) / (h(x1) A(x1,ell) out(ell)) ∧ 1
///   approximate: in(x1) / out(x1) ∧ 1
/// with h = A^{k−1} 1. The exact form is the Metropolis-Hastings ratio for
/// the pivot marginal of π_{F→G} under the random-walk proposal.
double pivot_acceptance(const Network& g, const PowerRowSums& h, std::size_t x1,
                        std::size_t ell, PivotMode mode);

/// One Pivot chain step for a k-chain motif. The tail x(2..k) is redrawn
/// from p_i(w) ∝ A(x(i−1), w) · h_{k−i}(w) in exact mode and from
/// p_i(w) ∝ A(x(i−1), w) in approximate mode. A pivot without out-weight,
/// a rejected move, or a dead end in the tail leave x unchanged. Returns
/// whether the move was accepted.
bool pivot_update(const Network& g, const PowerRowSums& h, Homomorphism& x, Rng& rng,
                  PivotMode mode);

enum class McmcKind { glauber, pivot, pivot_approx };

McmcKind parse_mcmc(std::string_view name);
std::string to_string(McmcKind kind);

/// A seeded chain over homomorphisms. Holds a reference to the network,
/// which must outlive the chain. Chain motifs start from
/// sample_chain_homomorphism, other motifs from rejection_sample.
class MotifChain {
 public:
  MotifChain(const Network& g, Motif f, McmcKind kind, Rng rng,
             std::size_t max_tries = 1'000'000);
  MotifChain(const Network& g, Motif f, McmcKind kind, Rng rng, Homomorphism start);

  void step();
  const Homomorphism& state() const { return x_; }
  const Motif& motif() const { return f_; }
  std::size_t steps() const { return steps_; }
  std::size_t accepted() const { return accepted_; }
  Rng& rng() { return rng_; }

 private:
  const Network* g_;
  Motif f_;
  McmcKind kind_;
  Rng rng_;
  std::optional<PowerRowSums> h_;
  Homomorphism x_;
  std::size_t steps_ = 0;
  std::size_t accepted_ = 0;
};

/// Probability table over V^k, indexed with x(1) most significant.
struct HomDistribution {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> prob;

  std::size_t index(const Homomorphism& x) const;
  Homomorphism decode(std::size_t index) const;
};

/// Exact π_{F→G} by enumeration; requires n^k <= 10^7.
HomDistribution hom_distribution_bruteforce(const Network& g, const Motif& f);

/// A_x(a, b) = A(x(a), x(b)).
Matrix mesoscale_patch(const Network& g, const Homomorphism& x);
/// Row-major flattening of mesoscale_patch into a k² vector.
Vector patch_vector(const Network& g, const Homomorphism& x);

/// ½ Σ |p − q|. Both inputs must sum to 1 within 1e−9.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace mnmf
