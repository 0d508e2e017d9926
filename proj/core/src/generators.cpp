#include "mnmf/generators.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mnmf/error.hpp"

namespace mnmf {
namespace {

using PairSet = std::set<std::pair<std::size_t, std::size_t>>;

void add_pair(PairSet& pairs, std::size_t a, std::size_t b) {
  if (a != b) pairs.insert(std::pair<std::size_t, std::size_t>(std::minmax(a, b)));
}

Network from_pairs(std::size_t n, const PairSet& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, 1.0});
  return Network::from_edges(n, edges, true);
}

}  // namespace

Network cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 nodes");
  PairSet pairs;
  for (std::size_t i = 0; i < n; ++i) add_pair(pairs, i, (i + 1) % n);
  return from_pairs(n, pairs);
}

Network path_graph(std::size_t n) {
  if (n < 1) throw std::invalid_argument("path needs at least 1 node");
  PairSet pairs;
  for (std::size_t i = 0; i + 1 < n; ++i) add_pair(pairs, i, i + 1);
  return from_pairs(n, pairs);
}

Network complete_graph(std::size_t n) {
  if (n < 1) throw std::invalid_argument("complete graph needs at least 1 node");
  PairSet pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) add_pair(pairs, a, b);
  }
  return from_pairs(n, pairs);
}

Network star_graph(std::size_t leaves) {
  if (leaves < 1) throw std::invalid_argument("star needs at least 1 leaf");
  PairSet pairs;
  for (std::size_t i = 1; i <= leaves; ++i) add_pair(pairs, 0, i);
  return from_pairs(leaves + 1, pairs);
}

Network torus_graph(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("torus dimensions must be positive");
  PairSet pairs;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      add_pair(pairs, v, ((r + 1) % rows) * cols + c);
      add_pair(pairs, v, r * cols + (c + 1) % cols);
    }
  }
  return from_pairs(rows * cols, pairs);
}

Network ring_lattice(std::size_t n, std::size_t neighbors) {
  if (neighbors < 2 || neighbors % 2 != 0 || neighbors >= n) {
    throw std::invalid_argument("ring lattice needs an even neighbour count below n");
  }
  PairSet pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= neighbors / 2; ++j) add_pair(pairs, i, (i + j) % n);
  }
  return from_pairs(n, pairs);
}

Network watts_strogatz(std::size_t n, std::size_t neighbors, double p, Rng& rng,
                       int max_attempts) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("rewiring probability must lie in [0, 1]");
  const Network lattice = ring_lattice(n, neighbors);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    PairSet pairs;
    for (const Edge& e : lattice.undirected_edges()) pairs.insert({e.source, e.target});
    for (std::size_t j = 1; j <= neighbors / 2; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        if (uniform01(rng) >= p) continue;
        const std::size_t neighbor = (i + j) % n;
        const std::size_t target = uniform_index(rng, n);
        const std::pair<std::size_t, std::size_t> old = std::minmax(i, neighbor);
        const std::pair<std::size_t, std::size_t> fresh = std::minmax(i, target);
        if (target == i || pairs.count(fresh)) continue;
        pairs.erase(old);
        pairs.insert(fresh);
      }
    }
    Network g = from_pairs(n, pairs);
    if (is_connected(g)) return g;
  }
  throw DataError("watts_strogatz: no connected draw within the attempt budget");
}

bool is_connected(const Network& g) {
  const std::size_t n = g.size();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const auto* list : {&g.out_neighbors(v), &g.in_neighbors(v)}) {
      for (const Neighbor& nb : *list) {
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          ++reached;
          stack.push_back(nb.node);
        }
      }
    }
  }
  return reached == n;
}

}  // namespace mnmf
