#include "mnmf/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mnmf/matrix_io.hpp"

namespace mnmf {

ScoreDirection parse_direction(std::string_view name) {
  if (name == "lower") return ScoreDirection::lower_is_positive;
  if (name == "higher") return ScoreDirection::higher_is_positive;
  throw std::invalid_argument("unknown score direction '" + std::string(name) +
                              "' (expected lower or higher)");
}

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> labels,
                 ScoreDirection direction) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: size mismatch");
  const double sign = direction == ScoreDirection::lower_is_positive ? 1.0 : -1.0;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sign * scores[a] < sign * scores[b];
  });
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc_auc: labels must contain both classes");
  }

  RocCurve curve;
  std::size_t tp = 0, fp = 0;
  auto emit = [&](double threshold) {
    curve.points.push_back({threshold, static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  };
  // Walking in the positive-first order, each distinct score is a threshold
  // that admits everything strictly before it.
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    emit(s);
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      labels[order[i]] ? ++tp : ++fp;
    }
  }
  emit(sign * std::numeric_limits<double>::infinity());

  for (std::size_t j = 1; j < curve.points.size(); ++j) {
    const RocPoint& a = curve.points[j - 1];
    const RocPoint& b = curve.points[j];
    curve.auc += 0.5 * (b.fpr - a.fpr) * (a.tpr + b.tpr);
  }
  return curve;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  for (const RocPoint& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr)
        << '\n';
  }
  out << "auc," << format_double(curve.auc) << '\n';
}

}  // namespace mnmf
