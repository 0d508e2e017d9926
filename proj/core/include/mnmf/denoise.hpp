#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "mnmf/ndl.hpp"
#include "mnmf/network.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

enum class NoiseMode { additive, subtractive };

NoiseMode parse_noise_mode(std::string_view name);

/// An unordered node pair u < v with its ground truth. `positive` marks the
/// class a low reconstruction weight should flag: a true non-edge under
/// subtractive noise and an inserted edge under additive noise.
struct LabeledPair {
  std::size_t u = 0;
  std::size_t v = 0;
  bool positive = false;
};

struct CorruptionResult {
  Network corrupted;
  /// Non-edges of `corrupted` (subtractive) or its edges (additive), in
  /// lexicographic order.
  std::vector<LabeledPair> labels;
  std::size_t changed = 0;
};

/// Subtractive: removes ceil(fraction |E|) uniformly shuffled edges, each
/// only if the graph stays connected. Additive: inserts ceil(fraction |E|)
/// uniformly chosen non-adjacent pairs. Requires a simple graph; throws
/// DataError when the quota cannot be met.
CorruptionResult corrupt_network(const Network& g, NoiseMode mode, double fraction, Rng& rng);

/// Labels every candidate pair of an uncorrupted run: the non-edges
/// (subtractive) or edges (additive) of g, compared against the original.
std::vector<LabeledPair> classification_universe(const Network& original, const Network& corrupted,
                                                 NoiseMode mode);

/// Mean of the stored reconstruction at (u, v) and (v, u) over the visited
/// directions; zero when neither was visited.
double pair_score(const ReconstructionState& state, std::size_t u, std::size_t v);

std::vector<double> pair_scores(const ReconstructionState& state,
                                const std::vector<LabeledPair>& pairs);

/// Predicted positive iff pair_score < theta.
std::vector<bool> denoise_classify(const ReconstructionState& state,
                                   const std::vector<LabeledPair>& pairs, double theta);

/// CSV "u,v,label" with label 1 for positives.
void write_labels_csv(std::ostream& out, const Network& g, const std::vector<LabeledPair>& pairs);

}  // namespace mnmf
