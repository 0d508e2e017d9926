#include "mnmf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mnmf {

void InvariantMonitor::observe(const Matrix& X, const StepResult& step,
                               const AggregateStats& stats) {
  ++steps_;
  radius_ = std::max(radius_, X.norm());
  auto flag = [&](const std::string& what, double lhs, double rhs) {
    std::ostringstream os;
    os << "step " << stats.t << ": " << what << " (" << lhs << " vs " << rhs << ")";
    violations_.push_back(os.str());
  };

  if (lambda_ > 0.0) {
    const double r2 = radius_ * radius_;
    const double a_bound = r2 * r2 / (lambda_ * lambda_);
    const double b_bound = r2 * radius_ / lambda_;
    const double h_bound = r2 / lambda_;
    const double slack = 1.0 + 1e-12;
    if (step.H.norm() > h_bound * slack + tol_) flag("||H||_F exceeds R^2/lambda", step.H.norm(), h_bound);
    if (stats.A.norm() > a_bound * slack + tol_) flag("||A||_F exceeds R^4/lambda^2", stats.A.norm(), a_bound);
    if (stats.B.norm() > b_bound * slack + tol_) flag("||B||_F exceeds R^3/lambda", stats.B.norm(), b_bound);
  }
  if (!step.fallback && step.ellipsoid > tol_) flag("ellipsoid condition violated", step.ellipsoid, 0.0);
  if (step.growth_margin < -tol_) flag("second-order growth margin negative", step.growth_margin, 0.0);

  max_ellipsoid_ = std::max(max_ellipsoid_, step.ellipsoid);
  min_growth_ = steps_ == 1 ? step.growth_margin : std::min(min_growth_, step.growth_margin);
  if (stats.t >= 2 && step.weight > 0.0) {
    stability_ = std::max(stability_, step.increment / step.weight);
  }
}

}  // namespace mnmf
