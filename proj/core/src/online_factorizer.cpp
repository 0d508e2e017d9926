#include <cmath>
#include <stdexcept>
#include <string>

#include "mnmf/error.hpp"
#include "mnmf/omf.hpp"

namespace mnmf {

WeightSchedule::WeightSchedule(double beta) : beta_(beta) {
  if (!(beta > 0.75 && beta <= 1.0)) {
    throw std::invalid_argument("weight schedule exponent must lie in (3/4, 1], got " +
                                std::to_string(beta));
  }
}

double WeightSchedule::weight(std::size_t t) const {
  if (t == 0) throw std::invalid_argument("weights are indexed from t = 1");
  if (beta_ == 1.0) return 1.0 / static_cast<double>(t);
  return std::pow(static_cast<double>(t), -beta_);
}

AggregateStats AggregateStats::zeros(std::size_t r, std::size_t d, double kappa1) {
  if (!(kappa1 >= 0.0)) throw std::invalid_argument("kappa1 must be nonnegative");
  AggregateStats s;
  s.A = Matrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
  s.B = Matrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d));
  s.kappa1 = kappa1;
  return s;
}

Dictionary random_dictionary(std::size_t d, std::size_t r, ConstraintSpec constraint, Rng& rng,
                             std::size_t piece) {
  constraint.validate();
  if (piece >= constraint.size()) throw std::invalid_argument("random_dictionary: no such piece");
  Matrix W(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(r));
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = uniform01(rng);
  }
  W = project(W, constraint.pieces[piece]);
  return Dictionary{std::move(W), std::move(constraint), piece};
}

AggregateStats update_aggregates(const AggregateStats& stats, const Matrix& H, const Matrix& X,
                                 const WeightSchedule& schedule, double lambda, double kappa2) {
  if (H.rows() != stats.A.rows() || H.cols() != X.cols() || X.rows() != stats.B.cols()) {
    throw std::invalid_argument("update_aggregates: dimension mismatch");
  }
  const double w = schedule.weight(stats.t + 1);
  AggregateStats next = stats;
  next.A = (1.0 - w) * stats.A + w * (H * H.transpose());
  next.A = 0.5 * (next.A + next.A.transpose()).eval();
  next.B = (1.0 - w) * stats.B + w * (H * X.transpose());
  const double sample = X.squaredNorm() + lambda * H.lpNorm<1>() + 0.5 * kappa2 * H.squaredNorm();
  next.remainder = (1.0 - w) * stats.remainder + w * sample;
  next.t = stats.t + 1;
  return next;
}

std::vector<double> empirical_weights(const WeightSchedule& schedule, std::size_t t) {
  std::vector<double> weights(t);
  double tail = 1.0;  // ∏_{j=s+1}^{t} (1 − w_j)
  for (std::size_t s = t; s >= 1; --s) {
    const double ws = schedule.weight(s);
    weights[s - 1] = ws * tail;
    tail *= 1.0 - ws;
  }
  return weights;
}

double empirical_loss(const Matrix& W, std::span<const Matrix> history,
                      const WeightSchedule& schedule, const CodingOptions& coding) {
  if (history.empty()) throw std::invalid_argument("empirical_loss: empty history");
  const auto weights = empirical_weights(schedule, history.size());
  double total = 0.0;
  for (std::size_t s = 0; s < history.size(); ++s) {
    total += weights[s] * sparse_code(history[s], W, coding).objective;
  }
  return total;
}

OnlineFactorizer::OnlineFactorizer(Dictionary initial, OmfParams params)
    : dict_(std::move(initial)), params_(params) {
  dict_.constraint.validate();
  if (dict_.active_piece >= dict_.constraint.size() ||
      !dict_.constraint.pieces[dict_.active_piece].contains(dict_.W)) {
    throw std::invalid_argument("initial dictionary must lie in its active constraint piece");
  }
  stats_ = AggregateStats::zeros(dict_.atoms(), dict_.dim(), params_.kappa1);
}

StepResult OnlineFactorizer::step(const Matrix& X) {
  if (X.rows() != dict_.W.rows()) {
    throw std::invalid_argument("data matrix has " + std::to_string(X.rows()) +
                                " rows, dictionary expects " + std::to_string(dict_.W.rows()));
  }
  StepResult out;
  out.H = sparse_code(X, dict_.W, params_.coding).H;
  stats_ = update_aggregates(stats_, out.H, X, params_.schedule, params_.coding.lambda,
                             params_.coding.kappa2);
  DictionaryUpdate upd = dictionary_update(dict_, stats_, params_.dictionary);

  out.weight = params_.schedule.weight(stats_.t);
  out.ellipsoid = upd.ellipsoid;
  out.fallback = upd.fallback;
  out.growth_margin = growth_check(dict_.W, upd.dictionary.W, stats_);
  out.increment = (upd.dictionary.W - dict_.W).norm();
  dict_ = std::move(upd.dictionary);
  out.surrogate = surrogate_loss(dict_.W, stats_);
  if (params_.keep_history) history_.push_back(X);
  return out;
}

}  // namespace mnmf
