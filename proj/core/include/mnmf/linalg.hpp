#pragma once

#include <Eigen/Dense>

namespace mnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace mnmf
