#include <stdexcept>
#include <string>

#include "mnmf/error.hpp"
#include "mnmf/omf.hpp"

namespace mnmf {

namespace {

void check_coding_inputs(const Matrix& X, const Matrix& W, const CodingOptions& opts) {
  if (X.rows() != W.rows()) {
    throw std::invalid_argument("sparse_code: X has " + std::to_string(X.rows()) +
                                " rows but W has " + std::to_string(W.rows()));
  }
  if (!(opts.lambda >= 0.0) || !(opts.kappa2 >= 0.0)) {
    throw std::invalid_argument("sparse_code: lambda and kappa2 must be nonnegative");
  }
  if (!(opts.tol > 0.0) || opts.max_iter <= 0) {
    throw std::invalid_argument("sparse_code: tol and max_iter must be positive");
  }
  if (!all_finite(X) || !all_finite(W)) throw NumericalError("sparse_code: non-finite input");
}

// Gradient of ½(||X − WH||² + λ||H||₁ + κ₂/2 ||H||²) on the nonnegative orthant.
Matrix half_gradient(const Matrix& gram, const Matrix& wtx, const Matrix& H,
                     const CodingOptions& opts) {
  Matrix grad = gram * H - wtx;
  grad.array() += 0.5 * opts.lambda;
  if (opts.kappa2 > 0.0) grad += (0.5 * opts.kappa2) * H;
  return grad;
}

}  // namespace

double coding_objective(const Matrix& X, const Matrix& W, const Matrix& H, double lambda,
                        double kappa2) {
  const double fit = (X - W * H).squaredNorm();
  return fit + lambda * H.lpNorm<1>() + 0.5 * kappa2 * H.squaredNorm();
}

Code sparse_code(const Matrix& X, const Matrix& W, const CodingOptions& opts) {
  check_coding_inputs(X, W, opts);
  const Matrix gram = W.transpose() * W;
  const double trace = gram.trace();
  if (!(trace > 0.0)) throw NumericalError("sparse_code: zero dictionary");
  const Matrix wtx = W.transpose() * X;
  const double step = 1.0 / (trace + 0.5 * opts.kappa2);

  Code code;
  code.H = Matrix::Zero(W.cols(), X.cols());
  Matrix next(code.H.rows(), code.H.cols());
  for (int it = 1; it <= opts.max_iter; ++it) {
    next = (code.H - step * half_gradient(gram, wtx, code.H, opts)).cwiseMax(0.0);
    const double change = (next - code.H).norm();
    code.H.swap(next);
    code.iterations = it;
    if (change < opts.tol) break;
  }
  code.objective = coding_objective(X, W, code.H, opts.lambda, opts.kappa2);
  return code;
}

double coding_kkt_residual(const Matrix& X, const Matrix& W, const Matrix& H,
                           const CodingOptions& opts) {
  check_coding_inputs(X, W, opts);
  const Matrix gram = W.transpose() * W;
  const double trace = gram.trace();
  if (!(trace > 0.0)) throw NumericalError("coding_kkt_residual: zero dictionary");
  const double step = 1.0 / (trace + 0.5 * opts.kappa2);
  const Matrix mapped =
      (H - step * half_gradient(gram, W.transpose() * X, H, opts)).cwiseMax(0.0);
  return (mapped - H).norm();
}

}  // namespace mnmf
