#include "mnmf/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mnmf/error.hpp"

namespace mnmf {

namespace {

bool scaling_commutes_with_clamp(double lower, double upper) {
  // clamp(theta * v) == theta * clamp(v) for theta > 0 exactly when each
  // bound is 0 or infinite.
  const bool lower_ok = lower == 0.0 || std::isinf(lower);
  const bool upper_ok = upper == 0.0 || std::isinf(upper);
  return lower_ok && upper_ok;
}

double clamped_norm(const Vector& v, double theta, double lower, double upper) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = std::clamp(theta * v[i], lower, upper);
    s += x * x;
  }
  return std::sqrt(s);
}

}  // namespace

bool ConstraintPiece::contains(const Matrix& w, double tol) const {
  if (w.size() > 0 && (w.minCoeff() < lower - tol || w.maxCoeff() > upper + tol)) return false;
  return w.norm() <= radius + tol * std::max(1.0, radius);
}

ConstraintSpec ConstraintSpec::nonnegative_ball(double radius) {
  return ConstraintSpec{{ConstraintPiece{0.0, std::numeric_limits<double>::infinity(), radius}}};
}

std::optional<std::size_t> ConstraintSpec::locate(const Matrix& w, double tol) const {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].contains(w, tol)) return i;
  }
  return std::nullopt;
}

void ConstraintSpec::validate() const {
  if (pieces.empty()) throw std::invalid_argument("constraint needs at least one piece");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (!(p.lower <= p.upper) || !(p.radius >= 0.0) || std::isnan(p.radius)) {
      throw std::invalid_argument("constraint piece " + std::to_string(i) + " is empty");
    }
    if (std::isinf(p.radius) && (std::isinf(p.lower) || std::isinf(p.upper))) {
      throw std::invalid_argument("constraint piece " + std::to_string(i) + " is unbounded");
    }
  }
}

void project_box_ball(Eigen::Ref<Vector> v, double lower, double upper, double radius) {
  Vector x = v;
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower, upper);
  if (std::isinf(radius) || x.norm() <= radius) {
    v = x;
    return;
  }
  if (clamped_norm(v, 0.0, lower, upper) > radius * (1.0 + 1e-12)) {
    throw NumericalError("box and ball constraints do not intersect");
  }
  if (scaling_commutes_with_clamp(lower, upper)) {
    v = x * (radius / x.norm());
    return;
  }
  // ||clamp(theta v)|| is nondecreasing in theta; keep the feasible end.
  const Vector orig = v;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (clamped_norm(orig, mid, lower, upper) <= radius) lo = mid; else hi = mid;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::clamp(lo * orig[i], lower, upper);
}

Matrix project(const Matrix& w, const ConstraintPiece& piece) {
  Matrix out = w;
  Eigen::Map<Vector> flat(out.data(), out.size());
  project_box_ball(flat, piece.lower, piece.upper, piece.radius);
  return out;
}

}  // namespace mnmf
