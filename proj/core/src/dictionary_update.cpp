#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "mnmf/error.hpp"
#include "mnmf/omf.hpp"

namespace mnmf {

namespace {

void check_stats(const Matrix& W, const AggregateStats& stats) {
  if (stats.A.rows() != W.cols() || stats.A.cols() != W.cols() || stats.B.rows() != W.cols() ||
      stats.B.cols() != W.rows()) {
    throw std::invalid_argument("aggregate statistics do not match the dictionary shape");
  }
}

// e(W) = tr((Bᵀ − W A)(W_prev − W)ᵀ) with the pieces needed for cheap
// per-column updates.
struct Ellipsoid {
  const Matrix& A;
  const Matrix& Bt;  // d x r
  const Matrix& W_prev;
  Matrix prevA;      // W_prev A

  Ellipsoid(const Matrix& a, const Matrix& bt, const Matrix& w_prev)
      : A(a), Bt(bt), W_prev(w_prev), prevA(w_prev * a) {}

  double value(const Matrix& W) const {
    return ((Bt - W * A).cwiseProduct(W_prev - W)).sum();
  }
};

// Largest s in [0, 1] with e0 + b s + a s² <= 0, for a >= 0 and e0 <= 0.
double max_feasible_step(double e0, double b, double a) {
  e0 = std::min(e0, 0.0);
  if (e0 + b + a <= 0.0) return 1.0;
  if (a <= 0.0) return b <= 0.0 ? 1.0 : std::clamp(-e0 / b, 0.0, 1.0);
  const double disc = std::sqrt(b * b - 4.0 * a * e0);
  const double root = b > 0.0 ? (-2.0 * e0) / (b + disc) : (-b + disc) / (2.0 * a);
  return std::clamp(root, 0.0, 1.0);
}

// Damped projected block-coordinate descent on tr(W A Wᵀ) − 2 tr(W Bt ᵀ)
// within one piece. When `guard` is set every column move is shortened so the
// iterate stays inside the ellipsoid.
int coordinate_descent(Matrix& W, const Matrix& A, const Matrix& Bt,
                       const ConstraintPiece& piece, const DictionaryOptions& opts,
                       const Ellipsoid* guard,
                       const std::function<bool(const Matrix&)>& stop = {}) {
  const Eigen::Index r = W.cols();
  const bool bounded_norm = std::isfinite(piece.radius);
  double total_sq = W.squaredNorm();
  double e = guard ? guard->value(W) : 0.0;
  Vector wa(W.rows()), cand(W.rows()), delta(W.rows());
  double lipschitz = -1.0;
  int sweeps = 0;
  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    sweeps = sweep;
    double change_sq = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      wa.noalias() = W * A.col(j);
      cand = W.col(j) - (wa - Bt.col(j)) / (A(j, j) + 1.0);
      const double own_sq = W.col(j).squaredNorm();
      double col_radius = std::numeric_limits<double>::infinity();
      if (bounded_norm) {
        const double others = std::max(0.0, total_sq - own_sq);
        col_radius = std::sqrt(std::max(0.0, piece.radius * piece.radius - others));
      }
      project_box_ball(cand, piece.lower, piece.upper, col_radius);
      delta = cand - W.col(j);
      double s = 1.0;
      if (guard) {
        const double a = A(j, j) * delta.squaredNorm();
        const double b = delta.dot(2.0 * wa - guard->prevA.col(j) - guard->Bt.col(j));
        s = max_feasible_step(e, b, a);
        e += s * b + s * s * a;
      }
      if (s <= 0.0) continue;
      delta *= s;
      W.col(j) += delta;
      total_sq += W.col(j).squaredNorm() - own_sq;
      change_sq += delta.squaredNorm();
    }
    if (bounded_norm) {
      // The Frobenius ball couples the columns, so column moves alone can stall
      // on its boundary. A whole-matrix projected gradient step restores
      // convergence to the minimizer over the piece.
      if (lipschitz < 0.0) {
        lipschitz = Eigen::SelfAdjointEigenSolver<Matrix>(A, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .maxCoeff();
      }
      if (lipschitz > 0.0) {
        Matrix D = W - (W * A - Bt) / lipschitz;
        Eigen::Map<Vector> flat(D.data(), D.size());
        project_box_ball(flat, piece.lower, piece.upper, piece.radius);
        D -= W;
        double s = 1.0;
        if (guard) {
          e = guard->value(W);
          const double a = (D * A).cwiseProduct(D).sum();
          const double b = (2.0 * W * A - guard->prevA - guard->Bt).cwiseProduct(D).sum();
          s = max_feasible_step(e, b, a);
        }
        W += s * D;
        change_sq += s * s * D.squaredNorm();
        total_sq = W.squaredNorm();
      }
    }
    if (guard) e = guard->value(W);
    if (stop && stop(W)) break;
    if (std::sqrt(change_sq) < opts.tol) break;
  }
  return sweeps;
}

// Moves W back along the segment towards a feasible `start` until the
// ellipsoid condition holds. Both endpoints lie in the same convex piece.
Matrix pull_back(const Matrix& start, const Matrix& W, const Ellipsoid& ell) {
  if (ell.value(W) <= 0.0) return W;
  const Matrix D = W - start;
  const double e0 = ell.value(start);
  const double b = ((2.0 * start * ell.A - ell.prevA - ell.Bt).cwiseProduct(D)).sum();
  const double a = ((D * ell.A).cwiseProduct(D)).sum();
  double s = max_feasible_step(e0, b, a);
  for (int i = 0; i < 64 && s > 0.0; ++i) {
    Matrix cand = start + s * D;
    if (ell.value(cand) <= 0.0) return cand;
    s *= 0.5;
  }
  return start;
}

// A + κ1 I, the Hessian (up to 2) of the quadratic the dictionary step minimizes.
Matrix ridged(const AggregateStats& stats) {
  Matrix A = stats.A;
  A.diagonal().array() += stats.kappa1;
  return A;
}

}  // namespace

double quadratic_objective(const Matrix& W, const Matrix& A, const Matrix& B) {
  return (W * A).cwiseProduct(W).sum() - 2.0 * W.cwiseProduct(B.transpose()).sum();
}

double surrogate_loss(const Matrix& W, const AggregateStats& stats) {
  check_stats(W, stats);
  return quadratic_objective(W, stats.A, stats.B) + stats.remainder;
}

double ellipsoid_value(const Matrix& W, const Matrix& W_prev, const AggregateStats& stats) {
  check_stats(W, stats);
  if (W_prev.rows() != W.rows() || W_prev.cols() != W.cols()) {
    throw std::invalid_argument("ellipsoid_value: dictionary shapes differ");
  }
  const Matrix A = ridged(stats);
  return ((stats.B.transpose() - W * A).cwiseProduct(W_prev - W)).sum();
}

double growth_check(const Matrix& W1, const Matrix& W2, const AggregateStats& stats) {
  check_stats(W1, stats);
  check_stats(W2, stats);
  const Matrix A = ridged(stats);
  const Matrix D = W1 - W2;
  return quadratic_objective(W1, A, stats.B) - quadratic_objective(W2, A, stats.B) -
         (D * A).cwiseProduct(D).sum();
}

DictionaryUpdate dictionary_update(const Dictionary& prev, const AggregateStats& stats,
                                   const DictionaryOptions& opts) {
  check_stats(prev.W, stats);
  prev.constraint.validate();
  if (!(opts.tol > 0.0) || opts.max_iter <= 0) {
    throw std::invalid_argument("dictionary_update: tol and max_iter must be positive");
  }
  if (!all_finite(stats.A) || !all_finite(stats.B) || !all_finite(prev.W)) {
    throw NumericalError("dictionary_update: non-finite input");
  }

  const Matrix A = ridged(stats);
  const Matrix Bt = stats.B.transpose();
  const Ellipsoid ell(A, Bt, prev.W);
  const std::size_t m = prev.constraint.size();
  // With a single convex piece the unconstrained-in-piece minimizer already
  // satisfies the ellipsoid condition, so columns move freely and only the
  // final iterate is pulled back if inexact convergence left it outside.
  const bool enforce_per_column = m > 1;

  std::optional<DictionaryUpdate> best;
  double best_obj = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < m; ++i) {
    const ConstraintPiece& piece = prev.constraint.pieces[i];
    Matrix start = prev.W;
    if (i != prev.active_piece || !piece.contains(start)) start = project(prev.W, piece);

    if (ell.value(start) > 0.0) {
      // Look for any point of this piece inside the ellipsoid by minimizing
      // e(W), itself a quadratic with Hessian A and linear term (B + A W_prevᵀ)/2.
      const Matrix Bt_e = 0.5 * (Bt + ell.prevA);
      coordinate_descent(start, A, Bt_e, piece, opts, nullptr,
                         [&ell](const Matrix& W) { return ell.value(W) <= 0.0; });
      if (ell.value(start) > 0.0) continue;
    }

    Matrix W = start;
    const int sweeps = coordinate_descent(W, A, Bt, piece, opts,
                                          enforce_per_column ? &ell : nullptr);
    W = pull_back(start, W, ell);

    const double obj = quadratic_objective(W, A, stats.B);
    if (!best || obj < best_obj) {
      best_obj = obj;
      best = DictionaryUpdate{Dictionary{std::move(W), prev.constraint, i}, 0.0, sweeps, false};
    }
  }

  if (!best) {
    std::cerr << "mnmf: dictionary update found no feasible piece; keeping previous dictionary\n";
    return DictionaryUpdate{prev, 0.0, 0, true};
  }
  best->ellipsoid = ell.value(best->dictionary.W);
  return *best;
}

}  // namespace mnmf
