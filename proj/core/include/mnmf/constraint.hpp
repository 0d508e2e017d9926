#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mnmf/linalg.hpp"

namespace mnmf {

/// One compact convex piece of the dictionary constraint set: an entrywise
/// box intersected with a Frobenius ball centred at the origin.
struct ConstraintPiece {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double radius = std::numeric_limits<double>::infinity();

  bool contains(const Matrix& w, double tol = 1e-9) const;
};

/// Disjoint union of convex pieces. The union may be non-convex.
struct ConstraintSpec {
  std::vector<ConstraintPiece> pieces;

  static ConstraintSpec nonnegative_ball(double radius);

  std::size_t size() const { return pieces.size(); }
  /// Index of the first piece containing w, if any.
  std::optional<std::size_t> locate(const Matrix& w, double tol = 1e-9) const;
  void validate() const;
};

/// Euclidean projection of v onto {lower <= v_i <= upper} ∩ {||v|| <= radius}.
/// Solves v_i -> clamp(theta * v_i) for the largest feasible theta in [0, 1];
/// throws NumericalError when the intersection is empty.
void project_box_ball(Eigen::Ref<Vector> v, double lower, double upper, double radius);

Matrix project(const Matrix& w, const ConstraintPiece& piece);

}  // namespace mnmf
