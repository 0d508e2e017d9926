#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace mnmf {

enum class ScoreDirection { lower_is_positive, higher_is_positive };

ScoreDirection parse_direction(std::string_view name);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Sweeps the threshold over every distinct score plus an infinite end
/// point. With lower_is_positive a pair is called positive when its score is
/// strictly below the threshold, so the curve runs from (0,0) to (1,1).
/// AUC is the trapezoid area. Throws std::invalid_argument unless both
/// classes occur.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> labels,
                 ScoreDirection direction = ScoreDirection::lower_is_positive);

/// CSV "threshold,fpr,tpr" followed by "auc,<value>".
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace mnmf
