#include "mnmf/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "mnmf/error.hpp"
#include "mnmf/generators.hpp"

namespace mnmf {
namespace {

using Pair = std::pair<std::size_t, std::size_t>;

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

bool connected_without(const std::vector<std::set<std::size_t>>& adj, std::size_t a, std::size_t b) {
  // Is b still reachable from a once the edge {a, b} is dropped?
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{a};
  seen[a] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : adj[v]) {
      if ((v == a && u == b) || (v == b && u == a) || seen[u]) continue;
      if (u == b) return true;
      seen[u] = 1;
      stack.push_back(u);
    }
  }
  return false;
}

Network build(const Network& like, const std::set<Pair>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, 1.0});
  Network g = Network::from_edges(like.size(), edges, true);
  g.set_labels(like.labels());
  return g;
}

}  // namespace

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "additive") return NoiseMode::additive;
  if (name == "subtractive") return NoiseMode::subtractive;
  throw std::invalid_argument("unknown noise mode '" + std::string(name) +
                              "' (expected additive or subtractive)");
}

CorruptionResult corrupt_network(const Network& g, NoiseMode mode, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("fraction must lie in (0, 1)");
  if (!g.is_simple()) throw DataError("corruption requires a simple undirected network");
  std::vector<Pair> edges;
  for (const Edge& e : g.undirected_edges()) edges.emplace_back(e.source, e.target);
  const auto quota = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(edges.size())));
  std::set<Pair> kept(edges.begin(), edges.end());
  std::set<Pair> changed;

  if (mode == NoiseMode::subtractive) {
    if (!is_connected(g)) throw DataError("subtractive corruption requires a connected network");
    std::vector<std::set<std::size_t>> adj(g.size());
    for (const auto& [a, b] : edges) {
      adj[a].insert(b);
      adj[b].insert(a);
    }
    shuffle(edges, rng);
    for (const auto& [a, b] : edges) {
      if (changed.size() == quota) break;
      if (!connected_without(adj, a, b)) continue;
      adj[a].erase(b);
      adj[b].erase(a);
      kept.erase({a, b});
      changed.insert({a, b});
    }
    if (changed.size() < quota) {
      throw DataError("only " + std::to_string(changed.size()) + " of " + std::to_string(quota) +
                      " edges can be removed without disconnecting the network");
    }
  } else {
    std::vector<Pair> candidates;
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        if (g.weight(a, b) == 0.0) candidates.emplace_back(a, b);
      }
    }
    if (candidates.size() < quota) {
      throw DataError("only " + std::to_string(candidates.size()) + " non-adjacent pairs, " +
                      std::to_string(quota) + " requested");
    }
    shuffle(candidates, rng);
    for (std::size_t i = 0; i < quota; ++i) {
      kept.insert(candidates[i]);
      changed.insert(candidates[i]);
    }
  }

  CorruptionResult out{build(g, kept), {}, changed.size()};
  out.labels = classification_universe(g, out.corrupted, mode);
  return out;
}

std::vector<LabeledPair> classification_universe(const Network& original, const Network& corrupted,
                                                 NoiseMode mode) {
  if (original.size() != corrupted.size()) throw std::invalid_argument("node sets differ");
  std::vector<LabeledPair> pairs;
  for (std::size_t a = 0; a < corrupted.size(); ++a) {
    for (std::size_t b = a + 1; b < corrupted.size(); ++b) {
      const bool present = corrupted.weight(a, b) > 0.0 || corrupted.weight(b, a) > 0.0;
      const bool genuine = original.weight(a, b) > 0.0 || original.weight(b, a) > 0.0;
      if (mode == NoiseMode::subtractive && !present) pairs.push_back({a, b, !genuine});
      if (mode == NoiseMode::additive && present) pairs.push_back({a, b, !genuine});
    }
  }
  return pairs;
}

double pair_score(const ReconstructionState& state, std::size_t u, std::size_t v) {
  double sum = 0.0;
  int seen = 0;
  for (const auto* e : {state.find(u, v), state.find(v, u)}) {
    if (e) {
      sum += e->value;
      ++seen;
    }
  }
  return seen ? sum / seen : 0.0;
}

std::vector<double> pair_scores(const ReconstructionState& state,
                                const std::vector<LabeledPair>& pairs) {
  std::vector<double> s;
  s.reserve(pairs.size());
  for (const auto& p : pairs) s.push_back(pair_score(state, p.u, p.v));
  return s;
}

std::vector<bool> denoise_classify(const ReconstructionState& state,
                                   const std::vector<LabeledPair>& pairs, double theta) {
  std::vector<bool> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(pair_score(state, p.u, p.v) < theta);
  return out;
}

void write_labels_csv(std::ostream& out, const Network& g, const std::vector<LabeledPair>& pairs) {
  out << "u,v,label\n";
  for (const auto& p : pairs) out << g.label(p.u) << ',' << g.label(p.v) << ',' << (p.positive ? 1 : 0) << '\n';
}

}  // namespace mnmf
