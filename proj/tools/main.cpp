#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mnmf/error.hpp"

#ifndef MNMF_VERSION
#define MNMF_VERSION "unknown"
#endif

namespace {

using namespace mnmf::cli;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kNumericalError = 3;

void add_common(CLI::App* sub, CommonOptions& c) {
  // Expanded before parsing by expand_config; registered so --help lists it.
  sub->add_option("--config", "TOML or INI file holding any of these options as key = value")
      ->type_name("FILE");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
}

void add_network(CLI::App* sub, NetworkOptions& n) {
  sub->add_option("--edges", n.edges, "Edge list: 'u v [w]' per line")->required();
  sub->add_flag("--undirected", n.undirected, "Insert every edge in both directions");
}

void add_learn(CLI::App* sub, LearnOptions& l) {
  sub->add_option("--atoms", l.atoms, "Number of dictionary atoms r")->capture_default_str();
  sub->add_option("--lambda", l.lambda, "L1 penalty")->capture_default_str();
  sub->add_option("--kappa1", l.kappa1, "Ridge on the dictionary step")->capture_default_str();
  sub->add_option("--kappa2", l.kappa2, "Ridge on the coding step")->capture_default_str();
  sub->add_option("--beta", l.beta, "Weight exponent, w_t = t^-beta")->capture_default_str();
  sub->add_option("--iters", l.iters, "Number of minibatches T")->capture_default_str();
  sub->add_option("--batch", l.batch, "Minibatch size N")->capture_default_str();
  sub->add_option("--radius", l.radius, "Frobenius radius of the dictionary set")
      ->capture_default_str();
  sub->add_option("--coding-tol", l.coding_tol)->capture_default_str();
  sub->add_option("--coding-max-iter", l.coding_max_iter)->capture_default_str();
  sub->add_option("--dict-tol", l.dict_tol)->capture_default_str();
  sub->add_option("--dict-max-iter", l.dict_max_iter)->capture_default_str();
}

CLI::Option* add_mcmc(CLI::App* sub, std::string& mcmc) {
  return sub->add_option("--mcmc", mcmc, "Chain: glauber, pivot or pivot-approx")
      ->check(CLI::IsMember({"glauber", "pivot", "pivot-approx", "pivot_approx"}))
      ->capture_default_str();
}

/// Replaces "--config FILE" with "--key=value" tokens read from FILE, placed
/// right after the subcommand so explicit flags given later take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t span = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      span = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      span = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + span));
    std::vector<std::string> injected;
    for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
      if (item.name == "++" || item.name == "--") continue;
      for (const std::string& value : item.inputs) injected.push_back("--" + item.name + "=" + value);
    }
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    break;
  }
  return args;
}

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "mnmf: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online matrix factorization on Markovian data and network dictionary learning"};
  app.set_version_flag("--version", std::string(MNMF_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  NdlLearnOptions ndl;
  auto* ndl_cmd = app.add_subcommand("ndl-learn", "Learn a network dictionary from motif samples");
  add_common(ndl_cmd, ndl.common);
  add_network(ndl_cmd, ndl.network);
  add_learn(ndl_cmd, ndl.learn);
  ndl_cmd->add_option("--motif-k", ndl.motif_k, "Chain motif size k")->capture_default_str();
  add_mcmc(ndl_cmd, ndl.mcmc);

  ReconstructOptions rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Reconstruct a network from a dictionary");
  add_common(rec_cmd, rec.common);
  add_network(rec_cmd, rec.network);
  rec_cmd->add_option("--dictionary", rec.dictionary, "Dictionary file")->required();
  rec_cmd->add_option("--motif-k", rec.motif_k, "Expected patch size; checked against the dictionary");
  rec_cmd->add_option("--iters", rec.iters, "Chain steps")->capture_default_str();
  rec_cmd->add_option("--lambda", rec.lambda, "L1 penalty")->capture_default_str();
  add_mcmc(rec_cmd, rec.mcmc);

  DenoiseOptions den;
  auto* den_cmd = app.add_subcommand("denoise", "Corrupt, reconstruct and score a network");
  add_common(den_cmd, den.common);
  add_network(den_cmd, den.network);
  add_learn(den_cmd, den.learn);
  den_cmd->add_option("--motif-k", den.motif_k, "Chain motif size k")->capture_default_str();
  add_mcmc(den_cmd, den.mcmc);
  den_cmd->add_option("--dictionary", den.dictionary,
                      "Dictionary file; learned on the corrupted network when omitted");
  den_cmd->add_option("--labels", den.labels,
                      "CSV 'u,v,label' for an already corrupted network");
  den_cmd->add_option("--mode", den.mode, "Noise: additive or subtractive")
      ->check(CLI::IsMember({"additive", "subtractive"}))
      ->capture_default_str();
  den_cmd->add_option("--fraction", den.fraction, "Corrupted share of the edge count");
  den_cmd->add_option("--threshold", den.threshold, "Emit predictions.csv at this threshold");
  den_cmd->add_option("--direction", den.direction, "Which scores flag positives: lower or higher")
      ->check(CLI::IsMember({"lower", "higher"}))
      ->capture_default_str();
  den_cmd->add_option("--recon-iters", den.recon_iters, "Reconstruction chain steps")
      ->capture_default_str();

  IsingLearnOptions ising;
  auto* ising_cmd = app.add_subcommand("ising-learn", "Learn a dictionary from Ising spin patches");
  add_common(ising_cmd, ising.common);
  add_learn(ising_cmd, ising.learn);
  ising_cmd->add_option("--lattice", ising.lattice, "Lattice side")->capture_default_str();
  ising_cmd->add_option("--patch,--motif-k", ising.patch, "Patch side k")->capture_default_str();
  ising_cmd->add_option("--temperature", ising.temperature)->capture_default_str();
  ising_cmd->add_option("--epoch", ising.epoch, "Gibbs site updates per minibatch")
      ->capture_default_str();
  ising_cmd->add_option("--init", ising.init, "Initial spins: random, plus or minus")
      ->check(CLI::IsMember({"random", "plus", "minus"}))
      ->capture_default_str();

  ImageLearnOptions img;
  auto* img_cmd = app.add_subcommand("image-learn", "Learn a dictionary from image patches");
  add_common(img_cmd, img.common);
  add_learn(img_cmd, img.learn);
  img_cmd->add_option("--image", img.image, "Binary PGM input")->required();
  img_cmd->add_option("--patch,--motif-k", img.patch, "Patch side k")->capture_default_str();
  img_cmd->add_option("--mode", img.mode, "Patch sampling: iid or walk")
      ->check(CLI::IsMember({"iid", "walk"}))
      ->capture_default_str();
  img_cmd->add_option("--stride", img.stride, "Reconstruction stride; defaults to the patch side");

  HomDiagOptions diag;
  auto* diag_cmd = app.add_subcommand("hom-diag", "Compare a motif chain with the exact law");
  add_common(diag_cmd, diag.common);
  add_network(diag_cmd, diag.network);
  diag_cmd->add_option("--motif-k", diag.motif_k, "Chain motif size k")->capture_default_str();
  add_mcmc(diag_cmd, diag.mcmc);
  diag_cmd->add_option("--steps,--iters", diag.steps, "Chain steps")->capture_default_str();
  diag_cmd->add_option("--chains", diag.chains, "Independent chains, run concurrently")
      ->capture_default_str();
  diag_cmd->add_option("--log-every", diag.log_every, "TV logging interval")
      ->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin() + 1, args.end());
    args.erase(args.begin());
    app.parse(std::move(args));
  } catch (const CLI::FileError& e) {
    return report("data error", e, kDataError);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (ndl_cmd->parsed()) run_ndl_learn(ndl);
    if (rec_cmd->parsed()) run_reconstruct(rec);
    if (den_cmd->parsed()) run_denoise(den);
    if (ising_cmd->parsed()) run_ising_learn(ising);
    if (img_cmd->parsed()) run_image_learn(img);
    if (diag_cmd->parsed()) run_hom_diag(diag);
  } catch (const mnmf::DataError& e) {
    return report("data error", e, kDataError);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("data error", e, kDataError);
  } catch (const mnmf::NumericalError& e) {
    return report("numerical failure", e, kNumericalError);
  } catch (const std::invalid_argument& e) {
    return report("usage error", e, kUsageError);
  } catch (const std::exception& e) {
    return report("error", e, kDataError);
  }
  return 0;
}
