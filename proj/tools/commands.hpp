#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace mnmf::cli {

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

struct NetworkOptions {
  std::string edges;
  bool undirected = false;
};

/// Parameters shared by every command that runs the online factorization.
struct LearnOptions {
  std::size_t atoms = 25;
  double lambda = 1.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double beta = 1.0;
  std::size_t iters = 100;
  std::size_t batch = 100;
  double radius = 1000.0;
  double coding_tol = 1e-6;
  int coding_max_iter = 200;
  double dict_tol = 1e-6;
  int dict_max_iter = 100;
};

struct NdlLearnOptions {
  CommonOptions common;
  NetworkOptions network;
  LearnOptions learn;
  std::size_t motif_k = 21;
  std::string mcmc = "pivot";
};

struct ReconstructOptions {
  CommonOptions common;
  NetworkOptions network;
  std::string dictionary;
  std::optional<std::size_t> motif_k;
  std::size_t iters = 10000;
  double lambda = 1.0;
  std::string mcmc = "pivot";
};

struct DenoiseOptions {
  CommonOptions common;
  NetworkOptions network;
  LearnOptions learn;
  std::size_t motif_k = 21;
  std::string mcmc = "pivot";
  std::string dictionary;      // learned on the corrupted network when empty
  std::string labels;          // ground truth for a pre-corrupted network
  std::string mode = "subtractive";
  std::optional<double> fraction;
  std::optional<double> threshold;
  std::string direction = "lower";
  std::size_t recon_iters = 50000;
};

struct IsingLearnOptions {
  CommonOptions common;
  LearnOptions learn;
  int lattice = 50;
  int patch = 10;
  double temperature = 2.26;
  std::size_t epoch = 1;
  std::string init = "random";
};

struct ImageLearnOptions {
  CommonOptions common;
  LearnOptions learn;
  std::string image;
  int patch = 10;
  std::string mode = "iid";
  int stride = 0;  // defaults to the patch size
};

struct HomDiagOptions {
  CommonOptions common;
  NetworkOptions network;
  std::size_t motif_k = 3;
  std::string mcmc = "glauber";
  std::size_t steps = 100000;
  std::size_t chains = 1;
  std::size_t log_every = 1000;
};

void run_ndl_learn(const NdlLearnOptions& opts);
void run_reconstruct(const ReconstructOptions& opts);
void run_denoise(const DenoiseOptions& opts);
void run_ising_learn(const IsingLearnOptions& opts);
void run_image_learn(const ImageLearnOptions& opts);
void run_hom_diag(const HomDiagOptions& opts);

}  // namespace mnmf::cli
