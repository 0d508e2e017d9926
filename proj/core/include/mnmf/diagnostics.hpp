#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mnmf/omf.hpp"

namespace mnmf {

/// Runtime checks of the engine's guaranteed inequalities, fed one step at a
/// time. Violations are recorded, never thrown, so a long run can report all
/// of them at the end.
class InvariantMonitor {
 public:
  explicit InvariantMonitor(double lambda, double tolerance = 1e-8)
      : lambda_(lambda), tol_(tolerance) {}

  /// Call after OnlineFactorizer::step with the data matrix that was consumed.
  void observe(const Matrix& X, const StepResult& step, const AggregateStats& stats);

  double stream_radius() const { return radius_; }
  /// sup_t ||W_t − W_{t−1}||_F / w_t over observed steps t >= 2.
  double stability_ratio() const { return stability_; }
  double min_growth_margin() const { return min_growth_; }
  double max_ellipsoid() const { return max_ellipsoid_; }
  std::size_t steps() const { return steps_; }
  const std::vector<std::string>& violations() const { return violations_; }
  bool ok() const { return violations_.empty(); }

 private:
  double lambda_;
  double tol_;
  double radius_ = 0.0;
  double stability_ = 0.0;
  double min_growth_ = 0.0;
  double max_ellipsoid_ = -1e300;
  std::size_t steps_ = 0;
  std::vector<std::string> violations_;
};

}  // namespace mnmf
