#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "mnmf/image.hpp"
#include "mnmf/ising.hpp"
#include "mnmf/motif.hpp"
#include "oracles.hpp"

using namespace mnmf;

TEST_CASE("heat-bath probabilities") {
  CHECK(plus_probability(0, 1.3) == 0.5);
  CHECK(plus_probability(4, 2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))));
  CHECK(plus_probability(4, 2.0) == doctest::Approx(0.98201).epsilon(1e-5));
  CHECK(plus_probability(-2, 1.0) + plus_probability(2, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("detailed balance at a single site") {
  // For x⁺, x⁻ differing at one site with neighbour sum S, π(x⁺)/π(x⁻) = e^{2S/T}
  // and P(x⁻ -> x⁺) / P(x⁺ -> x⁻) = p(S) / (1 − p(S)) must agree.
  for (double T : {0.5, 2.26, 5.0}) {
    for (int S : {-4, -2, 0, 2, 4}) {
      const double p = plus_probability(S, T);
      CHECK(std::log(p / (1.0 - p)) == doctest::Approx(2.0 * S / T));
    }
  }
}

TEST_CASE("lattice neighbours form a simple graph") {
  IsingConfig two(2, 1.0);
  CHECK(two.neighbor_sum(0) == 2);
  IsingConfig three(3, 1.0);
  CHECK(three.neighbor_sum(4) == 4);
  IsingConfig one(1, 1.0);
  CHECK(one.neighbor_sum(0) == 0);
}

TEST_CASE("Boltzmann enumeration matches an independent edge-list oracle") {
  for (int n : {2, 3}) {
    for (double T : {0.5, 2.26, 5.0}) {
      const auto a = boltzmann_distribution(n, T);
      const auto b = oracle::ising_boltzmann(n, T);
      REQUIRE(a.size() == b.size());
      CHECK(oracle::tv(a, b) < 1e-12);
    }
  }
  CHECK_THROWS_AS(boltzmann_distribution(5, 1.0), std::invalid_argument);
}

TEST_CASE("2x2 Gibbs chain matches the Boltzmann law") {
  Rng rng(derive_seed(99, 0));
  IsingConfig cfg = IsingConfig::random(2, 1.0, rng);
  std::vector<double> counts(16, 0.0);
  const int steps = 1'000'000;
  for (int s = 0; s < steps; ++s) {
    gibbs_step(cfg, rng);
    counts[config_index(cfg)] += 1.0;
  }
  for (double& c : counts) c /= steps;
  CHECK(tv_distance(counts, boltzmann_distribution(2, 1.0)) < 0.02);
}

TEST_CASE("spin patches") {
  Rng rng(1);
  IsingConfig up(4, 2.0, 1);
  CHECK(spin_patch_minibatch(up, 3, 5, rng) == Matrix::Ones(9, 5));
  IsingConfig down(4, 2.0, -1);
  CHECK(spin_patch_minibatch(down, 3, 5, rng) == Matrix::Zero(9, 5));

  IsingConfig checker(4, 2.0);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) checker.set(checker.index(r, c), (r + c) % 2 ? 1 : -1);
  }
  const Matrix X = spin_patch_minibatch(checker, 2, 50, rng);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    CHECK(X(0, j) == X(3, j));
    CHECK(X(1, j) == X(2, j));
    CHECK(X(0, j) + X(1, j) == 1.0);
  }
  CHECK_THROWS_AS(spin_patch_minibatch(checker, 5, 1, rng), std::invalid_argument);
}

TEST_CASE("patch map round trip") {
  for (int s : {-1, 1}) CHECK(2.0 * (0.5 * (s + 1)) - 1.0 == s);
}

TEST_CASE("image patches: constant image and walker steps") {
  Rng rng(2);
  ImageGrid img{Matrix::Constant(7, 9, 0.3)};
  PatchWalker walker;
  const Matrix X = image_patch_minibatch(img, 3, 20, PatchSampling::iid, walker, rng);
  CHECK((X.array() == 0.3).all());

  std::vector<std::pair<int, int>> pos;
  image_patch_minibatch(img, 3, 500, PatchSampling::walk, walker, rng, &pos);
  for (std::size_t i = 1; i < pos.size(); ++i) {
    const int dr = (pos[i].first - pos[i - 1].first + 7) % 7;
    const int dc = (pos[i].second - pos[i - 1].second + 9) % 9;
    const bool row_move = (dr == 1 || dr == 6) && dc == 0;
    const bool col_move = (dc == 1 || dc == 8) && dr == 0;
    CHECK((row_move || col_move));
  }
  CHECK_THROWS_AS(image_patch_minibatch(img, 8, 1, PatchSampling::iid, walker, rng),
                  std::invalid_argument);
}

TEST_CASE("image patches: iid corners are uniform") {
  Rng rng(3);
  ImageGrid img{Matrix::Zero(3, 3)};
  PatchWalker walker;
  std::vector<std::pair<int, int>> pos;
  const int samples = 100000;
  image_patch_minibatch(img, 2, samples, PatchSampling::iid, walker, rng, &pos);
  std::vector<double> counts(9, 0.0);
  for (auto [r, c] : pos) counts[static_cast<std::size_t>(r * 3 + c)] += 1.0;
  double chi2 = 0.0;
  const double expected = samples / 9.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 0.99 quantile of chi-square with 8 degrees of freedom.
  CHECK(chi2 < 20.09);
}

TEST_CASE("walker visits every corner") {
  Rng rng(4);
  PatchWalker w{0, 0, 3, 10, 10};
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < 100000; ++i) {
    w.step(rng);
    seen.insert({w.row, w.col});
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("grid reconstruction") {
  // Rank-one image: every patch is a multiple of one fixed pattern.
  const int k = 4;
  Vector col(12), row(12);
  for (int i = 0; i < 12; ++i) {
    col(i) = 0.2 + 0.05 * i;
    row(i) = 0.4 + 0.03 * ((i * 7) % 12);
  }
  ImageGrid img{col * row.transpose()};
  // With period-k factors every stride-k patch is the same rank-one block,
  // which is the first atom of W.
  Vector pc(12), pr(12);
  for (int i = 0; i < 12; ++i) {
    pc(i) = 0.3 + 0.1 * (i % k);
    pr(i) = 0.9 - 0.15 * (i % k);
  }
  ImageGrid periodic{pc * pr.transpose()};
  Matrix W(k * k, 2);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      W(a * k + b, 0) = periodic.pixels(a, b);
      W(a * k + b, 1) = (a == b) ? 1.0 : 0.0;
    }
  }
  const ImageGrid rec = reconstruct_grid(periodic, W, k, k, {0.0, 0.0, 1e-14, 100000});
  CHECK((rec.pixels - periodic.pixels).cwiseAbs().maxCoeff() < 1e-6);

  // One constant atom: each patch is replaced by its mean when stride = k.
  Matrix ones = Matrix::Ones(k * k, 1);
  const ImageGrid flat = reconstruct_grid(img, ones, k, k, {0.0, 0.0, 1e-14, 10000});
  for (int r0 = 0; r0 < 12; r0 += k) {
    for (int c0 = 0; c0 < 12; c0 += k) {
      const double mean_in = img.pixels.block(r0, c0, k, k).mean();
      const auto block = flat.pixels.block(r0, c0, k, k);
      CHECK(block.mean() == doctest::Approx(mean_in).epsilon(1e-9));
      CHECK(block.maxCoeff() - block.minCoeff() < 1e-12);
    }
  }
}

TEST_CASE("pgm round trip and atom grid") {
  const auto path = std::filesystem::temp_directory_path() / "mnmf_sources_test.pgm";
  ImageGrid img{Matrix(3, 5)};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) img.pixels(r, c) = (r * 5 + c) / 255.0;
  }
  write_pgm(path, img);
  const ImageGrid back = read_pgm(path);
  CHECK((back.pixels - img.pixels).cwiseAbs().maxCoeff() < 1e-12);
  std::filesystem::remove(path);

  Matrix W(4, 3);
  W << 0, 1, 5, 1, 1, 6, 2, 1, 7, 3, 1, 8;
  const ImageGrid grid = atom_grid(W, 2);
  CHECK(grid.rows() == 5);
  CHECK(grid.cols() == 5);
  CHECK(grid.pixels(0, 0) == 0.0);
  CHECK(grid.pixels(1, 1) == 1.0);
}
