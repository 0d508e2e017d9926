#pragma once

#include <cstddef>

#include "mnmf/network.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

// Simple undirected test graphs.

Network cycle_graph(std::size_t n);
Network path_graph(std::size_t n);
Network complete_graph(std::size_t n);
/// Node 0 is the centre.
Network star_graph(std::size_t leaves);
/// rows x cols square lattice with periodic boundary, as a simple graph.
Network torus_graph(std::size_t rows, std::size_t cols);
/// Each node joined to its `neighbors / 2` nearest nodes on each side.
Network ring_lattice(std::size_t n, std::size_t neighbors);

/// Watts-Strogatz small-world graph: ring lattice whose edges are rewired
/// with probability p to uniform targets, avoiding loops and duplicates.
/// Draws are repeated until the result is connected.
Network watts_strogatz(std::size_t n, std::size_t neighbors, double p, Rng& rng,
                       int max_attempts = 100);

bool is_connected(const Network& g);

}  // namespace mnmf
