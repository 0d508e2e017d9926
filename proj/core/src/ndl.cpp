#include "mnmf/ndl.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mnmf/error.hpp"

namespace mnmf {

void NdlParams::validate() const {
  if (k == 0 || iterations == 0 || batch == 0 || atoms == 0) {
    throw std::invalid_argument("k, iterations, batch and atoms must be positive");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (!(dict_radius > 0.0)) throw std::invalid_argument("dictionary radius must be positive");
  if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0)) throw std::invalid_argument("kappa1, kappa2 must be nonnegative");
  (void)WeightSchedule(beta);
}

CodingOptions NdlParams::coding() const {
  return CodingOptions{lambda, kappa2, coding_tol, coding_max_iter};
}

NetworkDictionary ndl_learn(const Network& g, const NdlParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t d = params.k * params.k;
  MotifChain chain(g, Motif::k_chain(params.k), params.mcmc, Rng(derive_seed(seed, 0)));
  Rng init_rng(derive_seed(seed, 1));
  Dictionary dict = random_dictionary(d, params.atoms,
                                      ConstraintSpec::nonnegative_ball(params.dict_radius), init_rng);

  OmfParams omf;
  omf.coding = params.coding();
  omf.dictionary = params.dictionary;
  omf.kappa1 = params.kappa1;
  omf.schedule = WeightSchedule(params.beta);
  OnlineFactorizer engine(std::move(dict), omf);

  NetworkDictionary out;
  out.surrogate_trace.reserve(params.iterations);
  Matrix X(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(params.batch));
  for (std::size_t t = 0; t < params.iterations; ++t) {
    for (std::size_t j = 0; j < params.batch; ++j) {
      chain.step();
      X.col(static_cast<Eigen::Index>(j)) = patch_vector(g, chain.state());
    }
    out.surrogate_trace.push_back(engine.step(X).surrogate);
  }
  out.W = engine.dictionary().W;
  out.stats = engine.stats();
  out.P = out.stats.A;
  out.Q = out.stats.B;
  out.dominance = dominance_scores(out.P);
  const Matrix H = sparse_code(X, out.W, omf.coding).H;
  out.residual = (X - out.W * H).squaredNorm() / static_cast<double>(params.batch);
  return out;
}

Vector dominance_scores(const Matrix& P) {
  if (P.rows() != P.cols()) throw std::invalid_argument("dominance_scores: P must be square");
  Vector s(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (P(i, i) < 0.0) throw NumericalError("dominance_scores: negative diagonal entry");
    s(i) = std::sqrt(P(i, i));
  }
  const double total = s.sum();
  if (!(total > 0.0)) throw NumericalError("degenerate aggregates");
  return s / total;
}

void ReconstructionState::fold(std::size_t a, std::size_t b, double proposal) {
  Entry& e = entries_[{a, b}];
  ++e.count;
  const double j = static_cast<double>(e.count);
  e.value = (1.0 - 1.0 / j) * e.value + proposal / j;
}

const ReconstructionState::Entry* ReconstructionState::find(std::size_t a, std::size_t b) const {
  auto it = entries_.find({a, b});
  return it == entries_.end() ? nullptr : &it->second;
}

ReconstructionState nr_reconstruct(const Network& g, const Matrix& W, const NrParams& params,
                                   std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(W.rows()))));
  if (k == 0 || k * k != static_cast<std::size_t>(W.rows())) {
    throw std::invalid_argument("dictionary rows must be a perfect square k²");
  }
  if (!(params.lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  MotifChain chain(g, Motif::k_chain(k), params.mcmc, Rng(derive_seed(seed, 2)));
  const CodingOptions coding{params.lambda, 0.0, params.coding_tol, params.coding_max_iter};
  ReconstructionState state;
  Matrix x(static_cast<Eigen::Index>(k * k), 1);
  for (std::size_t t = 0; t < params.iterations; ++t) {
    chain.step();
    const Homomorphism& h = chain.state();
    x.col(0) = patch_vector(g, h);
    const Vector local = W * sparse_code(x, W, coding).H.col(0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        state.fold(h[a], h[b], local(static_cast<Eigen::Index>(a * k + b)));
      }
    }
  }
  return state;
}

Network reconstruction_network(const Network& g, const ReconstructionState& state) {
  std::vector<Edge> edges;
  edges.reserve(state.entries().size());
  for (const auto& [key, e] : state.entries()) edges.push_back({key.first, key.second, e.value});
  Network out = Network::from_edges(g.size(), edges);
  out.set_labels(g.labels());
  return out;
}

void write_reconstruction(std::ostream& out, const Network& g, const ReconstructionState& state) {
  std::ostringstream buf;
  buf.precision(6);
  for (const auto& [key, e] : state.entries()) {
    buf << g.label(key.first) << ' ' << g.label(key.second) << ' ' << e.value << '\n';
  }
  out << buf.str();
}

}  // namespace mnmf
