#pragma once

// Online matrix factorization for Markov-dependent data streams.
//
// Each arriving data matrix X_t (d x n) is coded against the previous
// dictionary, folded into the aggregate statistics (A_t, B_t, r_t), and the
// dictionary is refreshed by minimizing the quadratic surrogate
//
//   f̂_t(W) = tr(W A_t Wᵀ) − 2 tr(W B_t) + r_t
//
// (with A_t replaced by A_t + κ1 I when a ridge κ1 is set) over the
// constraint set intersected with the ellipsoid
//
//   E_t = { W : tr((B_tᵀ − W A_t)(W_{t−1} − W)ᵀ) <= 0 }
//
// built from the same matrix.

#include <cstddef>
#include <span>
#include <vector>

#include "mnmf/constraint.hpp"
#include "mnmf/linalg.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

/// w_t = t^{-beta}, beta in (3/4, 1].
class WeightSchedule {
 public:
  explicit WeightSchedule(double beta = 1.0);

  double beta() const { return beta_; }
  /// Weight of the t-th sample, t >= 1.
  double weight(std::size_t t) const;

 private:
  double beta_;
};

struct Dictionary {
  Matrix W;
  ConstraintSpec constraint;
  std::size_t active_piece = 0;

  std::size_t dim() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t atoms() const { return static_cast<std::size_t>(W.cols()); }
};

/// Entries i.i.d. uniform on [0, 1], then projected onto piece `piece`.
Dictionary random_dictionary(std::size_t d, std::size_t r, ConstraintSpec constraint,
                             Rng& rng, std::size_t piece = 0);

/// Running sufficient statistics of the surrogate loss.
struct AggregateStats {
  Matrix A;               // r x r
  Matrix B;               // r x d
  double remainder = 0.0; // r_t, the W-independent part of f̂_t
  std::size_t t = 0;
  double kappa1 = 0.0;    // ridge added to A in the dictionary step

  static AggregateStats zeros(std::size_t r, std::size_t d, double kappa1 = 0.0);
};

struct CodingOptions {
  double lambda = 1.0;
  double kappa2 = 0.0;
  double tol = 1e-6;
  int max_iter = 200;
};

struct Code {
  Matrix H;
  int iterations = 0;
  double objective = 0.0;
};

/// ||X − W H||²_F + lambda ||H||_1 + (kappa2 / 2) ||H||²_F.
double coding_objective(const Matrix& X, const Matrix& W, const Matrix& H,
                        double lambda, double kappa2);

/// Nonnegative elastic-net coding by projected gradient with step
/// 1 / (tr(WᵀW) + kappa2/2), started from H = 0. Stops when the Frobenius
/// change between iterates drops below tol or after max_iter steps.
Code sparse_code(const Matrix& X, const Matrix& W, const CodingOptions& opts);

/// Fixed-point residual ||H − Π₊(H − step · ∇)||_F of the projected gradient
/// map used by sparse_code; zero exactly at the optimum.
double coding_kkt_residual(const Matrix& X, const Matrix& W, const Matrix& H,
                           const CodingOptions& opts);

/// Folds (H, X) into the aggregates with weight w_{t+1}:
///   A' = (1−w)A + w HHᵀ,  B' = (1−w)B + w HXᵀ,
///   r' = (1−w)r + w (tr(XXᵀ) + lambda ||H||_1 + kappa2/2 ||H||²_F).
AggregateStats update_aggregates(const AggregateStats& stats, const Matrix& H,
                                 const Matrix& X, const WeightSchedule& schedule,
                                 double lambda, double kappa2 = 0.0);

/// tr(W A Wᵀ) − 2 tr(W B).
double quadratic_objective(const Matrix& W, const Matrix& A, const Matrix& B);

double surrogate_loss(const Matrix& W, const AggregateStats& stats);

/// tr((Bᵀ − W A)(W_prev − W)ᵀ) with A + κ1 I in place of A; W lies in E_t iff
/// this is <= 0.
double ellipsoid_value(const Matrix& W, const Matrix& W_prev, const AggregateStats& stats);

/// g(W1) − g(W2) − tr((W1−W2) A (W1−W2)ᵀ) with g(W) = tr(W A Wᵀ) − 2 tr(W B),
/// again with A + κ1 I.
/// Nonnegative whenever W2 satisfies the ellipsoid condition relative to W1.
double growth_check(const Matrix& W1, const Matrix& W2, const AggregateStats& stats);

struct DictionaryOptions {
  double tol = 1e-6;
  int max_iter = 100;
};

struct DictionaryUpdate {
  Dictionary dictionary;
  double ellipsoid = 0.0;   // ellipsoid_value of the returned W
  int sweeps = 0;           // column sweeps spent on the winning piece
  bool fallback = false;    // no piece produced a feasible point; W_prev returned
};

/// Block-coordinate dictionary step over every convex piece, keeping the
/// best feasible candidate (lowest index on ties).
DictionaryUpdate dictionary_update(const Dictionary& prev, const AggregateStats& stats,
                                   const DictionaryOptions& opts);

/// w_s^t = w_s ∏_{j=s+1}^{t} (1 − w_j) for s = 1..t.
std::vector<double> empirical_weights(const WeightSchedule& schedule, std::size_t t);

/// Weighted empirical loss f_t(W) = Σ_s w_s^t ℓ(X_s, W), with ℓ re-solved by
/// sparse_code. Intended for diagnostics on short histories.
double empirical_loss(const Matrix& W, std::span<const Matrix> history,
                      const WeightSchedule& schedule, const CodingOptions& coding);

struct OmfParams {
  CodingOptions coding;
  DictionaryOptions dictionary;
  double kappa1 = 0.0;
  WeightSchedule schedule{1.0};
  bool keep_history = false;
};

struct StepResult {
  Matrix H;
  double surrogate = 0.0;      // f̂_t(W_t)
  double ellipsoid = 0.0;      // ellipsoid_value(W_t, W_{t−1})
  double growth_margin = 0.0;  // growth_check(W_{t−1}, W_t)
  double increment = 0.0;      // ||W_t − W_{t−1}||_F
  double weight = 0.0;         // w_t
  bool fallback = false;
};

/// Owns the dictionary and aggregates of one stream. Not thread-safe; one
/// step at a time.
class OnlineFactorizer {
 public:
  OnlineFactorizer(Dictionary initial, OmfParams params);

  StepResult step(const Matrix& X);

  const Dictionary& dictionary() const { return dict_; }
  const AggregateStats& stats() const { return stats_; }
  const OmfParams& params() const { return params_; }
  std::span<const Matrix> history() const { return history_; }

 private:
  Dictionary dict_;
  AggregateStats stats_;
  OmfParams params_;
  std::vector<Matrix> history_;
};

}  // namespace mnmf
