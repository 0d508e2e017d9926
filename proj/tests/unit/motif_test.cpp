#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mnmf/error.hpp"
#include "mnmf/generators.hpp"
#include "mnmf/motif.hpp"
#include "mnmf/network.hpp"
#include "oracles.hpp"

using namespace mnmf;

namespace {

Network weighted_five() {
  // Bidirectional but asymmetric and irregular.
  std::vector<Edge> e = {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 0.5}, {2, 1, 1.5}, {2, 3, 3.0},
                         {3, 2, 1.0}, {3, 4, 1.0}, {4, 3, 0.7}, {4, 0, 2.0}, {0, 4, 1.2},
                         {1, 3, 0.8}, {3, 1, 0.4}};
  return Network::from_edges(5, e);
}

Matrix dense(const Network& g) {
  Matrix A = Matrix::Zero(g.size(), g.size());
  for (const Edge& e : g.edges()) A(e.source, e.target) = e.weight;
  return A;
}

std::vector<double> run_chain(const Network& g, McmcKind kind, std::size_t k, int steps,
                              std::uint64_t seed) {
  MotifChain chain(g, Motif::k_chain(k), kind, Rng(seed));
  HomDistribution shape{g.size(), k, {}};
  std::vector<double> counts(static_cast<std::size_t>(std::pow(g.size(), k)), 0.0);
  for (int s = 0; s < steps; ++s) {
    chain.step();
    counts[shape.index(chain.state())] += 1.0;
  }
  for (double& c : counts) c /= steps;
  return counts;
}

}  // namespace

TEST_CASE("network construction and flags") {
  const Network c = cycle_graph(5);
  CHECK(c.is_simple());
  CHECK(c.is_symmetric());
  CHECK(c.is_bidirectional());
  CHECK(c.edge_count() == 10);
  CHECK(c.weight(0, 1) == 1.0);
  CHECK(c.weight(0, 2) == 0.0);
  CHECK(c.undirected_edges().size() == 5);

  const Network w = weighted_five();
  CHECK_FALSE(w.is_symmetric());
  CHECK(w.is_bidirectional());
  CHECK_FALSE(w.is_simple());
  CHECK(w.out_weight(0) == doctest::Approx(2.2));
  CHECK(w.in_weight(0) == doctest::Approx(4.0));

  const Network directed = Network::from_edges(3, {{0, 1, 1.0}});
  CHECK_FALSE(directed.is_bidirectional());
  CHECK_THROWS_AS(Network::from_edges(2, {{0, 1, -1.0}}), DataError);
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# comment\na b\nb c 2.5\n\nc a\n");
  const Network g = read_edge_list(in, true);
  CHECK(g.size() == 3);
  CHECK(g.label(0) == "a");
  CHECK(g.weight(1, 2) == 2.5);
  CHECK(g.weight(2, 1) == 2.5);
  CHECK(g.weight(0, 1) == 1.0);

  std::istringstream bad("a b\nb c zz\n");
  CHECK_THROWS_WITH_AS(read_edge_list(bad, false), doctest::Contains("line 2"), DataError);
  std::istringstream lonely("a b\nc\n");
  CHECK_THROWS_WITH_AS(read_edge_list(lonely, false), doctest::Contains("line 2"), DataError);

  std::ostringstream out;
  write_edge_list(out, g, true);
  std::istringstream again(out.str());
  const Network h = read_edge_list(again, true);
  CHECK(h.edge_count() == g.edge_count());
  CHECK(h.weight(1, 2) == 2.5);
}

TEST_CASE("generators") {
  CHECK(is_connected(path_graph(6)));
  CHECK(complete_graph(5).undirected_edges().size() == 10);
  CHECK(star_graph(4).out_weight(0) == 4.0);
  CHECK(torus_graph(3, 4).undirected_edges().size() == 24);
  CHECK(ring_lattice(10, 4).undirected_edges().size() == 20);
  Rng rng(5);
  const Network ws = watts_strogatz(200, 6, 0.1, rng);
  CHECK(ws.is_simple());
  CHECK(is_connected(ws));
  CHECK(ws.undirected_edges().size() == 600);
}

TEST_CASE("rejection sampling") {
  Rng rng(1);
  const Network one_edge = Network::from_edges(4, {{2, 3, 1.0}});
  for (int i = 0; i < 20; ++i) {
    const Homomorphism x = rejection_sample(one_edge, Motif::k_chain(2), rng);
    CHECK(x == Homomorphism{2, 3});
  }
  const Homomorphism single = rejection_sample(one_edge, Motif::k_chain(1), rng);
  CHECK(single.size() == 1);
  CHECK_THROWS_WITH_AS(rejection_sample(Network::from_edges(3, {}), Motif::k_chain(2), rng, 100),
                       doctest::Contains("no homomorphism found"), DataError);

  // Acceptance rate on K3 with a 2-chain is 6/9.
  const Network k3 = complete_graph(3);
  const Motif f = Motif::k_chain(2);
  int accepted = 0;
  const int trials = 90000;
  for (int i = 0; i < trials; ++i) {
    Homomorphism x{uniform_index(rng, 3), uniform_index(rng, 3)};
    accepted += motif_weight(k3, f, x) > 0.0;
  }
  CHECK(accepted / double(trials) == doctest::Approx(6.0 / 9.0).epsilon(0.01));
}

TEST_CASE("power row sums") {
  Rng rng(3);
  std::vector<Edge> e;
  for (int i = 0; i < 200; ++i) e.push_back({uniform_index(rng, 30), uniform_index(rng, 30), uniform01(rng)});
  const Network g = Network::from_edges(30, e);
  const PowerRowSums h(g, 4);
  const Matrix A = dense(g);
  Vector v = Vector::Ones(30);
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK((h.power(m) - v).norm() <= 1e-12 * (1.0 + v.norm()));
    v = A * v;
  }
}

TEST_CASE("pivot acceptance") {
  const Network c = cycle_graph(6);
  const PowerRowSums h(c, 3);
  CHECK(in_out_ratio(c, 2) == 1.0);
  for (std::size_t v = 0; v < 6; ++v) {
    for (const Neighbor& nb : c.out_neighbors(v)) {
      CHECK(pivot_acceptance(c, h, v, nb.node, PivotMode::exact) == 1.0);
      CHECK(pivot_acceptance(c, h, v, nb.node, PivotMode::approximate) == 1.0);
    }
  }
  const Network w = weighted_five();
  const PowerRowSums hw(w, 3);
  for (std::size_t v = 0; v < 5; ++v) {
    for (const Neighbor& nb : w.out_neighbors(v)) {
      for (PivotMode m : {PivotMode::exact, PivotMode::approximate}) {
        const double a = pivot_acceptance(w, hw, v, nb.node, m);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
      }
    }
  }
}

TEST_CASE("brute-force homomorphism laws") {
  const Motif chain2 = Motif::k_chain(2);
  const Network dc4 = Network::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  const HomDistribution d = hom_distribution_bruteforce(dc4, chain2);
  int support = 0;
  for (double p : d.prob) {
    if (p > 0.0) {
      ++support;
      CHECK(p == doctest::Approx(0.25));
    }
  }
  CHECK(support == 4);

  const HomDistribution c4 = hom_distribution_bruteforce(cycle_graph(4), Motif::k_chain(3));
  support = 0;
  for (double p : c4.prob) {
    if (p > 0.0) {
      ++support;
      CHECK(p == doctest::Approx(1.0 / 16.0));
    }
  }
  CHECK(support == 16);

  const Network w = weighted_five();
  const auto ref = oracle::chain3_law(dense(w));
  CHECK(oracle::tv(hom_distribution_bruteforce(w, Motif::k_chain(3)).prob, ref) < 1e-12);

  CHECK_THROWS_AS(hom_distribution_bruteforce(cycle_graph(400), Motif::k_chain(3)), std::invalid_argument);
  CHECK_THROWS_WITH_AS(hom_distribution_bruteforce(Network::from_edges(3, {}), chain2),
                       "no homomorphism", DataError);
}

TEST_CASE("mesoscale patches on a large-girth cycle") {
  const Network c6 = cycle_graph(6);
  const HomDistribution d = hom_distribution_bruteforce(c6, Motif::k_chain(3));
  Matrix expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  for (std::size_t i = 0; i < d.prob.size(); ++i) {
    if (d.prob[i] == 0.0) continue;
    const Homomorphism x = d.decode(i);
    CHECK(mesoscale_patch(c6, x) == expected);
    const Vector v = patch_vector(c6, x);
    CHECK(v(1) == 1.0);
    CHECK(v(3) == 1.0);
  }
}

TEST_CASE("total variation") {
  const std::vector<double> p{1.0, 0.0}, q{0.5, 0.5}, r{0.0, 1.0};
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(p, r) == 1.0);
  CHECK(tv_distance(p, q) == 0.5);
  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(tv_distance(p, bad), std::invalid_argument);
}

TEST_CASE("glauber conditional on a star") {
  // Resampling node 1 of a 2-chain with x(2) = centre gives the centre's
  // in-neighbours: every leaf.
  const Network star = star_graph(5);
  Rng rng(8);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    Homomorphism x{1, 0};
    glauber_update(star, Motif::k_chain(2), x, rng);
    CHECK(motif_weight(star, Motif::k_chain(2), x) > 0.0);
    if (x[1] == 0) seen.insert(x[0]);
  }
  CHECK(seen == std::set<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("chains keep valid homomorphisms") {
  const Network w = weighted_five();
  for (McmcKind kind : {McmcKind::glauber, McmcKind::pivot, McmcKind::pivot_approx}) {
    MotifChain chain(w, Motif::k_chain(4), kind, Rng(3));
    for (int s = 0; s < 2000; ++s) {
      chain.step();
      CHECK(motif_weight(w, chain.motif(), chain.state()) > 0.0);
    }
  }
  CHECK_THROWS_AS(MotifChain(w, Motif{Matrix::Ones(2, 2)}, McmcKind::pivot, Rng(1)),
                  std::invalid_argument);
}

TEST_CASE("glauber chain on a bipartite target keeps the pivot parity") {
  // Every move of a k-chain on a bipartite graph keeps x(1) on its side, so
  // a single trajectory covers only half of Hom(F, C6).
  const Network c6 = cycle_graph(6);
  MotifChain chain(c6, Motif::k_chain(3), McmcKind::glauber, Rng(42));
  const std::size_t side = chain.state()[0] % 2;
  for (int s = 0; s < 10000; ++s) {
    chain.step();
    CHECK(chain.state()[0] % 2 == side);
  }
  const auto emp = run_chain(c6, McmcKind::glauber, 3, 20000, 42);
  CHECK(tv_distance(emp, hom_distribution_bruteforce(c6, Motif::k_chain(3)).prob) ==
        doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("glauber chains started from rejection samples stay uniform on C6") {
  const Network c6 = cycle_graph(6);
  const HomDistribution target = hom_distribution_bruteforce(c6, Motif::k_chain(3));
  std::vector<double> counts(target.prob.size(), 0.0);
  const int chains = 1000, steps = 100;
  for (int c = 0; c < chains; ++c) {
    MotifChain chain(c6, Motif::k_chain(3), McmcKind::glauber, Rng(derive_seed(42, c)));
    for (int s = 0; s < steps; ++s) {
      chain.step();
      counts[target.index(chain.state())] += 1.0;
    }
  }
  for (double& v : counts) v /= chains * steps;
  CHECK(tv_distance(counts, target.prob) < 0.05);
}

TEST_CASE("exact pivot chain targets the motif law") {
  const Network w = weighted_five();
  const auto target = oracle::chain3_law(dense(w));
  const auto exact = run_chain(w, McmcKind::pivot, 3, 200000, 7);
  const auto approx = run_chain(w, McmcKind::pivot_approx, 3, 200000, 7);
  CHECK(oracle::tv(exact, target) < 0.05);
  MESSAGE("approximate pivot TV: " << oracle::tv(approx, target));
}

TEST_CASE("pivot dead end counts as a rejection") {
  const Network g = Network::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const PowerRowSums h(g, 2);
  Rng rng(1);
  Homomorphism x{1, 2};
  CHECK_FALSE(pivot_update(g, h, x, rng, PivotMode::approximate));
  CHECK(x == Homomorphism{1, 2});
}

TEST_CASE("sequential chain sampler draws from the motif law") {
  const Network w = weighted_five();
  const PowerRowSums h(w, 3);
  Rng rng(77);
  const auto target = oracle::chain3_law(dense(w));
  HomDistribution shape{5, 3, {}};
  std::vector<double> counts(target.size(), 0.0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) counts[shape.index(sample_chain_homomorphism(w, h, rng))] += 1.0;
  for (double& c : counts) c /= draws;
  CHECK(oracle::tv(counts, target) < 0.02);
  CHECK_THROWS_AS(sample_chain_homomorphism(Network::from_edges(3, {}), PowerRowSums(Network::from_edges(3, {}), 2), rng),
                  DataError);
}
