#include "mnmf/motif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mnmf/error.hpp"

namespace mnmf {

Motif Motif::k_chain(std::size_t k) {
  if (k == 0) throw std::invalid_argument("motif needs at least one node");
  const auto kk = static_cast<Eigen::Index>(k);
  Motif f{Matrix::Zero(kk, kk)};
  for (Eigen::Index i = 0; i + 1 < kk; ++i) f.adjacency(i, i + 1) = 1.0;
  return f;
}

bool Motif::is_chain() const {
  const Motif ref = k_chain(size());
  return adjacency == ref.adjacency;
}

double motif_weight(const Network& g, const Motif& f, const Homomorphism& x) {
  const std::size_t k = f.size();
  if (x.size() != k) throw std::invalid_argument("homomorphism size does not match motif");
  double w = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double e = f.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (e == 0.0) continue;
      const double a = g.weight(x[i], x[j]);
      if (a == 0.0) return 0.0;
      w *= e == 1.0 ? a : std::pow(a, e);
    }
  }
  return w;
}

Homomorphism rejection_sample(const Network& g, const Motif& f, Rng& rng, std::size_t max_tries) {
  if (g.size() == 0) throw DataError("no homomorphism found: empty network");
  Homomorphism x(f.size());
  for (std::size_t t = 0; t < max_tries; ++t) {
    for (auto& v : x) v = uniform_index(rng, g.size());
    if (motif_weight(g, f, x) > 0.0) return x;
  }
  throw DataError("no homomorphism found after " + std::to_string(max_tries) +
                  " proposals; raise the try budget");
}

PowerRowSums::PowerRowSums(const Network& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("PowerRowSums: k must be positive");
  const auto n = static_cast<Eigen::Index>(g.size());
  h_.reserve(k);
  h_.push_back(Vector::Ones(n));
  for (std::size_t m = 1; m < k; ++m) {
    const Vector& prev = h_.back();
    Vector next(n);
    for (Eigen::Index v = 0; v < n; ++v) {
      double s = 0.0;
      for (const Neighbor& nb : g.out_neighbors(static_cast<std::size_t>(v))) {
        s += nb.weight * prev(static_cast<Eigen::Index>(nb.node));
      }
      next(v) = s;
    }
    h_.push_back(std::move(next));
  }
}

Homomorphism sample_chain_homomorphism(const Network& g, const PowerRowSums& h, Rng& rng) {
  const std::size_t k = h.order();
  const Vector& top = h.power(k - 1);
  const double total = top.sum();
  if (!(total > 0.0)) throw DataError("no homomorphism found: the network has no walk of length " + std::to_string(k - 1));
  Homomorphism x(k);
  x[0] = sample_discrete(rng, std::span<const double>(top.data(), static_cast<std::size_t>(top.size())), total);
  std::vector<double> weights;
  for (std::size_t i = 1; i < k; ++i) {
    const auto& nb = g.out_neighbors(x[i - 1]);
    weights.resize(nb.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < nb.size(); ++j) sum += (weights[j] = nb[j].weight * h(k - 1 - i, nb[j].node));
    x[i] = nb[sample_discrete(rng, weights, sum)].node;
  }
  return x;
}

void glauber_update(const Network& g, const Motif& f, Homomorphism& x, Rng& rng) {
  const std::size_t k = f.size();
  const std::size_t v = uniform_index(rng, k);
  const auto vi = static_cast<Eigen::Index>(v);

  // Candidates: the shortest neighbour list among the constraints on v.
  const std::vector<Neighbor>* candidates = nullptr;
  for (std::size_t u = 0; u < k; ++u) {
    if (u == v) continue;
    const auto ui = static_cast<Eigen::Index>(u);
    if (f.adjacency(ui, vi) > 0.0) {
      const auto* list = &g.out_neighbors(x[u]);
      if (!candidates || list->size() < candidates->size()) candidates = list;
    }
    if (f.adjacency(vi, ui) > 0.0) {
      const auto* list = &g.in_neighbors(x[u]);
      if (!candidates || list->size() < candidates->size()) candidates = list;
    }
  }

  auto conditional = [&](std::size_t w) {
    Homomorphism y = x;
    y[v] = w;
    return motif_weight(g, f, y);
  };

  if (!candidates) {
    if (f.adjacency(vi, vi) == 0.0) {
      x[v] = uniform_index(rng, g.size());
      return;
    }
    std::vector<double> weights(g.size());
    double total = 0.0;
    for (std::size_t w = 0; w < g.size(); ++w) total += (weights[w] = conditional(w));
    if (!(total > 0.0)) throw NumericalError("glauber_update: empty conditional law");
    x[v] = sample_discrete(rng, weights, total);
    return;
  }

  std::vector<double> weights(candidates->size());
  double total = 0.0;
  for (std::size_t i = 0; i < candidates->size(); ++i) {
    total += (weights[i] = conditional((*candidates)[i].node));
  }
  if (!(total > 0.0)) throw NumericalError("glauber_update: empty conditional law");
  x[v] = (*candidates)[sample_discrete(rng, weights, total)].node;
}

double in_out_ratio(const Network& g, std::size_t v) {
  const double out = g.out_weight(v);
  const double in = g.in_weight(v);
  if (out == 0.0) return in == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return in / out;
}

double pivot_acceptance(const Network& g, const PowerRowSums& h, std::size_t x1,
                        std::size_t ell, PivotMode mode) {
  if (mode == PivotMode::approximate) return std::min(1.0, in_out_ratio(g, x1));
  const std::size_t m = h.order() - 1;
  const double forward = h(m, x1) * g.weight(x1, ell) * g.out_weight(ell);
  const double backward = h(m, ell) * g.weight(ell, x1) * g.out_weight(x1);
  if (backward == 0.0) return 0.0;
  if (forward == 0.0) return 1.0;
  return std::min(1.0, backward / forward);
}

bool pivot_update(const Network& g, const PowerRowSums& h, Homomorphism& x, Rng& rng,
                  PivotMode mode) {
  const std::size_t k = x.size();
  if (h.order() != k) throw std::invalid_argument("pivot_update: row sums built for another k");
  const std::size_t x1 = x[0];
  const auto& out = g.out_neighbors(x1);
  if (out.empty()) return false;

  std::vector<double> weights(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) weights[i] = out[i].weight;
  const std::size_t ell = out[sample_discrete(rng, weights, g.out_weight(x1))].node;
  if (!(uniform01(rng) < pivot_acceptance(g, h, x1, ell, mode))) return false;

  Homomorphism y(k);
  y[0] = ell;
  for (std::size_t i = 1; i < k; ++i) {
    const auto& nb = g.out_neighbors(y[i - 1]);
    weights.resize(nb.size());
    double total = 0.0;
    for (std::size_t j = 0; j < nb.size(); ++j) {
      weights[j] = nb[j].weight;
      if (mode == PivotMode::exact) weights[j] *= h(k - 1 - i, nb[j].node);
      total += weights[j];
    }
    if (!(total > 0.0)) return false;
    y[i] = nb[sample_discrete(rng, weights, total)].node;
  }
  x = std::move(y);
  return true;
}

McmcKind parse_mcmc(std::string_view name) {
  if (name == "glauber") return McmcKind::glauber;
  if (name == "pivot") return McmcKind::pivot;
  if (name == "pivot-approx" || name == "pivot_approx") return McmcKind::pivot_approx;
  throw std::invalid_argument("unknown chain '" + std::string(name) +
                              "' (expected glauber, pivot or pivot-approx)");
}

std::string to_string(McmcKind kind) {
  switch (kind) {
    case McmcKind::glauber: return "glauber";
    case McmcKind::pivot: return "pivot";
    case McmcKind::pivot_approx: return "pivot-approx";
  }
  return "unknown";
}

MotifChain::MotifChain(const Network& g, Motif f, McmcKind kind, Rng rng, std::size_t max_tries)
    : g_(&g), f_(std::move(f)), kind_(kind), rng_(std::move(rng)) {
  if (kind_ != McmcKind::glauber && !f_.is_chain()) {
    throw std::invalid_argument("the Pivot chain requires a k-chain motif");
  }
  if (f_.is_chain()) {
    h_.emplace(g, f_.size());
    x_ = sample_chain_homomorphism(g, *h_, rng_);
  } else {
    x_ = rejection_sample(g, f_, rng_, max_tries);
  }
}

MotifChain::MotifChain(const Network& g, Motif f, McmcKind kind, Rng rng, Homomorphism start)
    : g_(&g), f_(std::move(f)), kind_(kind), rng_(std::move(rng)), x_(std::move(start)) {
  if (kind_ != McmcKind::glauber) {
    if (!f_.is_chain()) throw std::invalid_argument("the Pivot chain requires a k-chain motif");
    h_.emplace(g, f_.size());
  }
  if (!(motif_weight(g, f_, x_) > 0.0)) throw std::invalid_argument("start is not a homomorphism");
}

void MotifChain::step() {
  ++steps_;
  switch (kind_) {
    case McmcKind::glauber:
      glauber_update(*g_, f_, x_, rng_);
      ++accepted_;
      break;
    case McmcKind::pivot:
      accepted_ += pivot_update(*g_, *h_, x_, rng_, PivotMode::exact);
      break;
    case McmcKind::pivot_approx:
      accepted_ += pivot_update(*g_, *h_, x_, rng_, PivotMode::approximate);
      break;
  }
}

std::size_t HomDistribution::index(const Homomorphism& x) const {
  std::size_t idx = 0;
  for (std::size_t v : x) idx = idx * n + v;
  return idx;
}

Homomorphism HomDistribution::decode(std::size_t index) const {
  Homomorphism x(k);
  for (std::size_t i = k; i-- > 0;) {
    x[i] = index % n;
    index /= n;
  }
  return x;
}

HomDistribution hom_distribution_bruteforce(const Network& g, const Motif& f) {
  const std::size_t n = g.size();
  const std::size_t k = f.size();
  double states = 1.0;
  for (std::size_t i = 0; i < k; ++i) states *= static_cast<double>(n);
  if (states > 1e7) {
    throw std::invalid_argument("n^k = " + std::to_string(static_cast<long long>(states)) +
                                " exceeds the enumeration limit 1e7; use a smaller graph");
  }
  HomDistribution dist{n, k, std::vector<double>(static_cast<std::size_t>(states), 0.0)};
  double z = 0.0;
  for (std::size_t i = 0; i < dist.prob.size(); ++i) {
    z += (dist.prob[i] = motif_weight(g, f, dist.decode(i)));
  }
  if (!(z > 0.0)) throw DataError("no homomorphism");
  for (double& p : dist.prob) p /= z;
  return dist;
}

Matrix mesoscale_patch(const Network& g, const Homomorphism& x) {
  const auto k = static_cast<Eigen::Index>(x.size());
  Matrix p(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      p(a, b) = g.weight(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
    }
  }
  return p;
}

Vector patch_vector(const Network& g, const Homomorphism& x) {
  const auto k = static_cast<Eigen::Index>(x.size());
  Vector v(k * k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      v(a * k + b) = g.weight(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
    }
  }
  return v;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double sp = 0.0, sq = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    l1 += std::abs(p[i] - q[i]);
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
    throw std::invalid_argument("tv_distance: inputs must be probability vectors");
  }
  return 0.5 * l1;
}

}  // namespace mnmf
