#include "commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mnmf/denoise.hpp"
#include "mnmf/error.hpp"
#include "mnmf/image.hpp"
#include "mnmf/ising.hpp"
#include "mnmf/matrix_io.hpp"
#include "mnmf/motif.hpp"
#include "mnmf/ndl.hpp"
#include "mnmf/network.hpp"
#include "mnmf/omf.hpp"
#include "mnmf/roc.hpp"
#include "run_output.hpp"

#ifndef MNMF_VERSION
#define MNMF_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace mnmf::cli {
namespace {

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

RunMeta base_meta(const std::string& command, const CommonOptions& common) {
  RunMeta meta;
  meta.set("command", command);
  meta.set("mnmf_version", std::string(MNMF_VERSION));
  meta.set("eigen_version", eigen_version());
  meta.set("seed", std::to_string(common.seed));
  meta.set("out_dir", common.out_dir);
  return meta;
}

void add_learn_meta(RunMeta& meta, const LearnOptions& l) {
  meta.set("atoms", l.atoms);
  meta.set("lambda", l.lambda);
  meta.set("kappa1", l.kappa1);
  meta.set("kappa2", l.kappa2);
  meta.set("beta", l.beta);
  meta.set("iters", l.iters);
  meta.set("batch", l.batch);
  meta.set("radius", l.radius);
  meta.set("coding_tol", l.coding_tol);
  meta.set("coding_max_iter", static_cast<std::size_t>(l.coding_max_iter));
  meta.set("dict_tol", l.dict_tol);
  meta.set("dict_max_iter", static_cast<std::size_t>(l.dict_max_iter));
}

void add_network_meta(RunMeta& meta, const NetworkOptions& n) {
  meta.set("edges", n.edges);
  meta.set("undirected", std::string(n.undirected ? "true" : "false"));
}

Network load_network(const NetworkOptions& n) {
  if (n.edges.empty()) throw std::invalid_argument("--edges is required");
  return read_edge_list(fs::path(n.edges), n.undirected);
}

OmfParams omf_params(const LearnOptions& l) {
  OmfParams p;
  p.coding = {l.lambda, l.kappa2, l.coding_tol, l.coding_max_iter};
  p.dictionary = {l.dict_tol, l.dict_max_iter};
  p.kappa1 = l.kappa1;
  p.schedule = WeightSchedule(l.beta);
  return p;
}

NdlParams ndl_params(const LearnOptions& l, std::size_t k, const std::string& mcmc) {
  NdlParams p;
  p.k = k;
  p.iterations = l.iters;
  p.batch = l.batch;
  p.atoms = l.atoms;
  p.lambda = l.lambda;
  p.dict_radius = l.radius;
  p.mcmc = parse_mcmc(mcmc);
  p.beta = l.beta;
  p.kappa1 = l.kappa1;
  p.kappa2 = l.kappa2;
  p.coding_tol = l.coding_tol;
  p.coding_max_iter = l.coding_max_iter;
  p.dictionary = {l.dict_tol, l.dict_max_iter};
  p.validate();
  return p;
}

void write_aggregates(const fs::path& path, const AggregateStats& stats, double beta) {
  std::ostringstream out;
  write_checkpoint(out, stats, beta);
  write_text(path, out.str());
}

/// Dictionary, aggregates, loss trace, atom grid and dominance sidecar.
void write_learned(const fs::path& dir, const Matrix& W, const AggregateStats& stats, double beta,
                   const std::vector<double>& trace, int k) {
  save_matrix(dir / "dictionary.txt", W);
  write_aggregates(dir / "aggregates.txt", stats, beta);
  write_loss_trace(dir / "loss_trace.csv", trace);
  write_pgm(dir / "atoms.pgm", atom_grid(W, k));
  write_dominance(dir / "dominance.csv", dominance_scores(stats.A));
}

std::size_t patch_side(const Matrix& W) {
  const auto rows = static_cast<std::size_t>(W.rows());
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows))));
  if (k * k != rows) throw DataError("dictionary row count is not a perfect square");
  return k;
}

/// Reads "u,v,label" rows naming nodes by their edge-list labels.
std::vector<LabeledPair> read_labels_csv(const fs::path& path, const Network& g) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < g.size(); ++v) index.emplace(g.label(v), v);

  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line.rfind("u,v", 0) == 0)) continue;
    std::stringstream row(line);
    std::string u, v, label;
    if (!std::getline(row, u, ',') || !std::getline(row, v, ',') || !std::getline(row, label) ||
        (label != "0" && label != "1")) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": expected u,v,0|1");
    }
    const auto iu = index.find(u);
    const auto iv = index.find(v);
    if (iu == index.end() || iv == index.end()) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": unknown node");
    }
    pairs.push_back({std::min(iu->second, iv->second), std::max(iu->second, iv->second),
                     label == "1"});
  }
  if (pairs.empty()) throw DataError(path.string() + ": no labeled pairs");
  return pairs;
}

void write_network(const fs::path& path, const Network& g) {
  write_edge_list(path, g, g.is_symmetric());
}

}  // namespace

void run_ndl_learn(const NdlLearnOptions& opts) {
  const NdlParams params = ndl_params(opts.learn, opts.motif_k, opts.mcmc);
  const Network g = load_network(opts.network);
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  RunMeta meta = base_meta("ndl-learn", opts.common);
  add_network_meta(meta, opts.network);
  meta.set("motif_k", opts.motif_k);
  meta.set("mcmc", to_string(params.mcmc));
  add_learn_meta(meta, opts.learn);
  meta.write(dir / "run_meta.txt");

  const NetworkDictionary nd = ndl_learn(g, params, opts.common.seed);
  write_learned(dir, nd.W, nd.stats, params.beta, nd.surrogate_trace, static_cast<int>(params.k));
}

void run_reconstruct(const ReconstructOptions& opts) {
  if (opts.dictionary.empty()) throw std::invalid_argument("--dictionary is required");
  const Matrix W = load_matrix(opts.dictionary);
  const std::size_t k = patch_side(W);
  if (opts.motif_k && *opts.motif_k != k) {
    throw DataError("dictionary has patch size " + std::to_string(k) + " but --motif-k is " +
                    std::to_string(*opts.motif_k));
  }
  const Network g = load_network(opts.network);
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  NrParams nr;
  nr.iterations = opts.iters;
  nr.lambda = opts.lambda;
  nr.mcmc = parse_mcmc(opts.mcmc);

  RunMeta meta = base_meta("reconstruct", opts.common);
  add_network_meta(meta, opts.network);
  meta.set("dictionary", opts.dictionary);
  meta.set("motif_k", k);
  meta.set("mcmc", to_string(nr.mcmc));
  meta.set("iters", nr.iterations);
  meta.set("lambda", nr.lambda);
  meta.write(dir / "run_meta.txt");

  const ReconstructionState state = nr_reconstruct(g, W, nr, opts.common.seed);
  std::ostringstream out;
  write_reconstruction(out, g, state);
  write_text(dir / "recons.txt", out.str());
}

void run_denoise(const DenoiseOptions& opts) {
  const NoiseMode mode = parse_noise_mode(opts.mode);
  const ScoreDirection direction = parse_direction(opts.direction);
  if (opts.fraction && !opts.labels.empty()) {
    throw std::invalid_argument("--fraction and --labels are mutually exclusive");
  }
  if (!opts.fraction && opts.labels.empty()) {
    throw std::invalid_argument("either --fraction or --labels is required");
  }
  NdlParams params = ndl_params(opts.learn, opts.motif_k, opts.mcmc);
  Matrix W;
  if (!opts.dictionary.empty()) {
    W = load_matrix(opts.dictionary);
    if (patch_side(W) != opts.motif_k) {
      throw DataError("dictionary has patch size " + std::to_string(patch_side(W)) +
                      " but --motif-k is " + std::to_string(opts.motif_k));
    }
  }
  const Network g = load_network(opts.network);
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  RunMeta meta = base_meta("denoise", opts.common);
  add_network_meta(meta, opts.network);
  meta.set("mode", opts.mode);
  if (opts.fraction) meta.set("fraction", *opts.fraction);
  if (!opts.labels.empty()) meta.set("labels", opts.labels);
  if (!opts.dictionary.empty()) meta.set("dictionary", opts.dictionary);
  meta.set("motif_k", opts.motif_k);
  meta.set("mcmc", to_string(params.mcmc));
  add_learn_meta(meta, opts.learn);
  meta.set("recon_iters", opts.recon_iters);
  meta.set("direction", opts.direction);
  if (opts.threshold) meta.set("threshold", *opts.threshold);
  meta.write(dir / "run_meta.txt");

  Network corrupted;
  std::vector<LabeledPair> labels;
  if (opts.fraction) {
    Rng rng(derive_seed(opts.common.seed, 3));
    CorruptionResult cr = corrupt_network(g, mode, *opts.fraction, rng);
    corrupted = std::move(cr.corrupted);
    labels = std::move(cr.labels);
    write_network(dir / "corrupted.txt", corrupted);
  } else {
    corrupted = g;
    labels = read_labels_csv(opts.labels, g);
  }
  {
    std::ostringstream out;
    write_labels_csv(out, corrupted, labels);
    write_text(dir / "labels.csv", out.str());
  }

  if (W.size() == 0) {
    const NetworkDictionary nd = ndl_learn(corrupted, params, opts.common.seed);
    W = nd.W;
    write_learned(dir, nd.W, nd.stats, params.beta, nd.surrogate_trace,
                  static_cast<int>(params.k));
  }

  NrParams nr;
  nr.iterations = opts.recon_iters;
  nr.lambda = opts.learn.lambda;
  nr.mcmc = params.mcmc;
  nr.coding_tol = params.coding_tol;
  nr.coding_max_iter = params.coding_max_iter;
  const ReconstructionState state = nr_reconstruct(corrupted, W, nr, opts.common.seed);
  {
    std::ostringstream out;
    write_reconstruction(out, corrupted, state);
    write_text(dir / "recons.txt", out.str());
  }

  const std::vector<double> scores = pair_scores(state, labels);
  std::unique_ptr<bool[]> truth(new bool[labels.size()]);
  for (std::size_t i = 0; i < labels.size(); ++i) truth[i] = labels[i].positive;
  const RocCurve roc = roc_auc(scores, std::span<const bool>(truth.get(), labels.size()), direction);
  {
    std::ostringstream out;
    write_roc_csv(out, roc);
    write_text(dir / "roc.csv", out.str());
  }

  if (opts.threshold) {
    const bool lower = direction == ScoreDirection::lower_is_positive;
    std::ostringstream out;
    out << "u,v,score,predicted\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool predicted = lower ? scores[i] < *opts.threshold : scores[i] > *opts.threshold;
      out << corrupted.label(labels[i].u) << ',' << corrupted.label(labels[i].v) << ','
          << format_double(scores[i]) << ',' << (predicted ? 1 : 0) << '\n';
    }
    write_text(dir / "predictions.csv", out.str());
  }
}

void run_ising_learn(const IsingLearnOptions& opts) {
  const LearnOptions& l = opts.learn;
  if (opts.lattice < 2) throw std::invalid_argument("--lattice must be at least 2");
  if (opts.patch < 1 || opts.patch > opts.lattice) {
    throw std::invalid_argument("--patch must lie in [1, lattice]");
  }
  if (!(opts.temperature > 0.0)) throw std::invalid_argument("--temperature must be positive");
  if (opts.epoch < 1) throw std::invalid_argument("--epoch must be at least 1");
  if (l.iters < 1 || l.batch < 1 || l.atoms < 1) {
    throw std::invalid_argument("--iters, --batch and --atoms must be positive");
  }
  if (opts.init != "random" && opts.init != "plus" && opts.init != "minus") {
    throw std::invalid_argument("--init must be random, plus or minus");
  }
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  RunMeta meta = base_meta("ising-learn", opts.common);
  meta.set("lattice", static_cast<std::size_t>(opts.lattice));
  meta.set("patch", static_cast<std::size_t>(opts.patch));
  meta.set("temperature", opts.temperature);
  meta.set("epoch", opts.epoch);
  meta.set("init", opts.init);
  add_learn_meta(meta, l);
  meta.write(dir / "run_meta.txt");

  Rng chain_rng(derive_seed(opts.common.seed, 0));
  Rng init_rng(derive_seed(opts.common.seed, 1));
  Rng patch_rng(derive_seed(opts.common.seed, 2));
  IsingConfig cfg = opts.init == "random" ? IsingConfig::random(opts.lattice, opts.temperature, chain_rng)
                    : IsingConfig(opts.lattice, opts.temperature, opts.init == "plus" ? 1 : -1);

  const auto d = static_cast<std::size_t>(opts.patch * opts.patch);
  OnlineFactorizer omf(random_dictionary(d, l.atoms, ConstraintSpec::nonnegative_ball(l.radius),
                                         init_rng),
                       omf_params(l));
  std::vector<double> trace;
  trace.reserve(l.iters);
  double residual = 0.0;
  for (std::size_t t = 0; t < l.iters; ++t) {
    for (std::size_t s = 0; s < opts.epoch; ++s) gibbs_step(cfg, chain_rng);
    const Matrix X = spin_patch_minibatch(cfg, opts.patch, static_cast<int>(l.batch), patch_rng);
    const StepResult step = omf.step(X);
    trace.push_back(step.surrogate);
    if (t + 1 == l.iters) {
      residual = (X - omf.dictionary().W * step.H).squaredNorm() / static_cast<double>(l.batch);
    }
  }

  write_learned(dir, omf.dictionary().W, omf.stats(), l.beta, trace, opts.patch);
  ImageGrid final_config{Matrix(opts.lattice, opts.lattice)};
  for (int r = 0; r < opts.lattice; ++r) {
    for (int c = 0; c < opts.lattice; ++c) final_config.pixels(r, c) = (cfg.spin(r, c) + 1) / 2;
  }
  write_pgm(dir / "final_config.pgm", final_config);

  RunMeta summary;
  summary.set("final_surrogate", trace.back());
  summary.set("final_residual", residual);
  summary.write(dir / "summary.txt");
}

void run_image_learn(const ImageLearnOptions& opts) {
  const LearnOptions& l = opts.learn;
  PatchSampling mode;
  if (opts.mode == "iid") {
    mode = PatchSampling::iid;
  } else if (opts.mode == "walk") {
    mode = PatchSampling::walk;
  } else {
    throw std::invalid_argument("--mode must be iid or walk for image-learn");
  }
  if (opts.image.empty()) throw std::invalid_argument("--image is required");
  if (l.iters < 1 || l.batch < 1 || l.atoms < 1) {
    throw std::invalid_argument("--iters, --batch and --atoms must be positive");
  }
  const ImageGrid image = read_pgm(opts.image);
  if (opts.patch < 1 || opts.patch > std::min(image.rows(), image.cols())) {
    throw std::invalid_argument("--patch must lie in [1, min(image rows, cols)]");
  }
  const int stride = opts.stride > 0 ? opts.stride : opts.patch;
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  RunMeta meta = base_meta("image-learn", opts.common);
  meta.set("image", opts.image);
  meta.set("patch", static_cast<std::size_t>(opts.patch));
  meta.set("mode", opts.mode);
  meta.set("stride", static_cast<std::size_t>(stride));
  add_learn_meta(meta, l);
  meta.write(dir / "run_meta.txt");

  Rng patch_rng(derive_seed(opts.common.seed, 0));
  Rng init_rng(derive_seed(opts.common.seed, 1));
  PatchWalker walker;
  walker.k = opts.patch;
  walker.grid_rows = image.rows();
  walker.grid_cols = image.cols();
  walker.row = static_cast<int>(uniform_index(patch_rng, static_cast<std::size_t>(image.rows())));
  walker.col = static_cast<int>(uniform_index(patch_rng, static_cast<std::size_t>(image.cols())));

  const auto d = static_cast<std::size_t>(opts.patch * opts.patch);
  const OmfParams params = omf_params(l);
  OnlineFactorizer omf(random_dictionary(d, l.atoms, ConstraintSpec::nonnegative_ball(l.radius),
                                         init_rng),
                       params);
  std::vector<double> trace;
  trace.reserve(l.iters);
  std::vector<std::pair<int, int>> positions;
  for (std::size_t t = 0; t < l.iters; ++t) {
    const Matrix X = image_patch_minibatch(image, opts.patch, static_cast<int>(l.batch), mode,
                                           walker, patch_rng, &positions);
    trace.push_back(omf.step(X).surrogate);
  }

  write_learned(dir, omf.dictionary().W, omf.stats(), l.beta, trace, opts.patch);
  write_pgm(dir / "reconstruction.pgm",
            reconstruct_grid(image, omf.dictionary().W, opts.patch, stride, params.coding));
  std::ostringstream out;
  out << "sample,row,col\n";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out << i + 1 << ',' << positions[i].first << ',' << positions[i].second << '\n';
  }
  write_text(dir / "positions.csv", out.str());
}

namespace {

struct ChainRun {
  std::vector<double> counts;
  std::vector<double> tv;
  std::size_t accepted = 0;
};

std::string dist_csv(const HomDistribution& target, const std::vector<double>& counts,
                     double total) {
  std::ostringstream out;
  for (std::size_t i = 1; i <= target.k; ++i) out << 'x' << i << ',';
  out << "empirical,exact\n";
  for (std::size_t i = 0; i < target.prob.size(); ++i) {
    if (target.prob[i] == 0.0 && counts[i] == 0.0) continue;
    for (const std::size_t v : target.decode(i)) out << v << ',';
    out << format_double(counts[i] / total) << ',' << format_double(target.prob[i]) << '\n';
  }
  return out.str();
}

std::string tv_csv(const std::vector<std::size_t>& steps, const std::vector<double>& tv) {
  std::ostringstream out;
  out << "step,tv\n";
  for (std::size_t i = 0; i < tv.size(); ++i) out << steps[i] << ',' << format_double(tv[i]) << '\n';
  return out.str();
}

}  // namespace

void run_hom_diag(const HomDiagOptions& opts) {
  if (opts.motif_k < 1) throw std::invalid_argument("--motif-k must be positive");
  if (opts.steps < 1) throw std::invalid_argument("--steps must be positive");
  if (opts.chains < 1) throw std::invalid_argument("--chains must be at least 1");
  if (opts.log_every < 1) throw std::invalid_argument("--log-every must be positive");
  const McmcKind kind = parse_mcmc(opts.mcmc);
  const Network g = load_network(opts.network);
  const Motif f = Motif::k_chain(opts.motif_k);
  HomDistribution target;
  try {
    target = hom_distribution_bruteforce(g, f);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(e.what()) +
                    "; use a smaller graph or motif so that n^k <= 10^7");
  }
  const fs::path dir = prepare_out_dir(opts.common.out_dir);

  RunMeta meta = base_meta("hom-diag", opts.common);
  add_network_meta(meta, opts.network);
  meta.set("motif_k", opts.motif_k);
  meta.set("mcmc", to_string(kind));
  meta.set("steps", opts.steps);
  meta.set("chains", opts.chains);
  meta.set("log_every", opts.log_every);
  meta.write(dir / "run_meta.txt");

  std::vector<std::size_t> log_steps;
  for (std::size_t s = opts.log_every; s <= opts.steps; s += opts.log_every) log_steps.push_back(s);
  if (log_steps.empty() || log_steps.back() != opts.steps) log_steps.push_back(opts.steps);

  // Chains are advanced segment by segment so the pooled trace can be
  // formed at every log point; each chain owns its RNG stream, so thread
  // scheduling cannot change the output.
  const std::size_t c = opts.chains;
  std::vector<MotifChain> chains;
  chains.reserve(c);
  for (std::size_t i = 0; i < c; ++i) {
    const std::uint64_t seed = c == 1 ? opts.common.seed : derive_seed(opts.common.seed, 100 + i);
    chains.emplace_back(g, f, kind, Rng(seed));
  }
  std::vector<ChainRun> runs(c);
  for (auto& r : runs) r.counts.assign(target.prob.size(), 0.0);
  std::vector<double> pooled_tv;

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(c, std::thread::hardware_concurrency()));
  std::size_t done = 0;
  for (const std::size_t until : log_steps) {
    const std::size_t segment = until - done;
    auto advance = [&](std::size_t first) {
      for (std::size_t i = first; i < c; i += workers) {
        for (std::size_t s = 0; s < segment; ++s) {
          chains[i].step();
          runs[i].counts[target.index(chains[i].state())] += 1.0;
        }
        std::vector<double> emp(runs[i].counts);
        for (double& x : emp) x /= static_cast<double>(until);
        runs[i].tv.push_back(tv_distance(emp, target.prob));
      }
    };
    if (workers == 1) {
      advance(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(advance, w);
      for (auto& t : pool) t.join();
    }
    done = until;
    if (c > 1) {
      std::vector<double> emp(target.prob.size(), 0.0);
      for (const auto& r : runs) {
        for (std::size_t j = 0; j < emp.size(); ++j) emp[j] += r.counts[j];
      }
      for (double& x : emp) x /= static_cast<double>(until * c);
      pooled_tv.push_back(tv_distance(emp, target.prob));
    }
  }

  RunMeta summary;
  if (c == 1) {
    write_text(dir / "empirical_dist.csv",
               dist_csv(target, runs[0].counts, static_cast<double>(opts.steps)));
    write_text(dir / "tv_trace.csv", tv_csv(log_steps, runs[0].tv));
    summary.set("final_tv", runs[0].tv.back());
    summary.set("acceptance_rate",
                static_cast<double>(chains[0].accepted()) / static_cast<double>(opts.steps));
  } else {
    std::vector<double> pooled(target.prob.size(), 0.0);
    for (std::size_t i = 0; i < c; ++i) {
      const std::string suffix = "_chain" + std::to_string(i + 1) + ".csv";
      write_text(dir / ("empirical_dist" + suffix),
                 dist_csv(target, runs[i].counts, static_cast<double>(opts.steps)));
      write_text(dir / ("tv_trace" + suffix), tv_csv(log_steps, runs[i].tv));
      for (std::size_t j = 0; j < pooled.size(); ++j) pooled[j] += runs[i].counts[j];
    }
    write_text(dir / "empirical_dist.csv",
               dist_csv(target, pooled, static_cast<double>(opts.steps * c)));
    write_text(dir / "tv_trace.csv", tv_csv(log_steps, pooled_tv));
    summary.set("final_tv", pooled_tv.back());
  }
  summary.write(dir / "summary.txt");
}

}  // namespace mnmf::cli
