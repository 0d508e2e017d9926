#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mnmf/constraint.hpp"
#include "mnmf/diagnostics.hpp"
#include "mnmf/error.hpp"
#include "mnmf/matrix_io.hpp"
#include "mnmf/omf.hpp"
#include "oracles.hpp"

using namespace mnmf;

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform01(rng);
  }
  return m;
}

AggregateStats stats_from(const Matrix& A, const Matrix& B, double kappa1 = 0.0) {
  AggregateStats s;
  s.A = A;
  s.B = B;
  s.kappa1 = kappa1;
  s.t = 1;
  return s;
}

}  // namespace

TEST_CASE("weight schedule") {
  CHECK_THROWS_AS(WeightSchedule(0.75), std::invalid_argument);
  CHECK_THROWS_AS(WeightSchedule(1.01), std::invalid_argument);
  const WeightSchedule s(0.9);
  CHECK(s.weight(1) == 1.0);
  for (std::size_t t = 1; t < 50; ++t) CHECK(s.weight(t + 1) <= s.weight(t));
  CHECK(WeightSchedule(1.0).weight(4) == 0.25);
}

TEST_CASE("box-ball projection") {
  Vector v(3);
  v << 3.0, -1.0, 4.0;
  project_box_ball(v, 0.0, std::numeric_limits<double>::infinity(), 1.0);
  CHECK(v(1) == 0.0);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(v(0) / v(2) == doctest::Approx(0.75));

  Vector w(2);
  w << 5.0, 0.5;
  project_box_ball(w, 1.0, 2.0, 10.0);
  CHECK(w(0) == 2.0);
  CHECK(w(1) == 1.0);

  Vector u(2);
  u << 1.0, 1.0;
  CHECK_THROWS_AS(project_box_ball(u, 1.0, 2.0, 0.5), NumericalError);

  // The projection is the nearest feasible point: compare against a grid.
  Vector p(2);
  p << 1.7, -0.4;
  Vector q = p;
  project_box_ball(q, 0.0, 1.5, 1.2);
  double best = 1e9;
  for (int a = 0; a <= 300; ++a) {
    for (int b = 0; b <= 300; ++b) {
      Vector c(2);
      c << 1.5 * a / 300.0, 1.5 * b / 300.0;
      if (c.norm() <= 1.2) best = std::min(best, (c - p).norm());
    }
  }
  CHECK((q - p).norm() <= best + 1e-9);
}

TEST_CASE("sparse coding: identity dictionary reproduces the data") {
  Matrix W = Matrix::Identity(2, 2);
  Matrix X(2, 2);
  X << 1, 0, 0, 2;
  const Code c = sparse_code(X, W, {0.0, 0.0, 1e-12, 10000});
  CHECK((c.H - X).norm() < 1e-9);
  CHECK(c.objective < 1e-16);
}

TEST_CASE("sparse coding: large lambda gives the zero code") {
  Rng rng(3);
  const Matrix X = uniform_matrix(5, 4, rng);
  const Matrix W = uniform_matrix(5, 3, rng);
  const double lambda = 2.0 * (W.transpose() * X).maxCoeff();
  const Code c = sparse_code(X, W, {lambda, 0.0, 1e-10, 1000});
  CHECK(c.H.norm() == 0.0);
}

TEST_CASE("sparse coding: matches the long-run descent oracle on a 4x3 example") {
  Rng rng(11);
  const Matrix X = uniform_matrix(4, 3, rng);
  const Matrix W = uniform_matrix(4, 2, rng);
  const double reference = oracle::coding_long_descent(X, W, 0.1, 1e-4, 1'000'000);
  const Code c = sparse_code(X, W, {0.1, 0.0, 1e-10, 100000});
  CHECK(std::abs(c.objective - reference) < 1e-4);
  CHECK(std::abs(c.objective - oracle::coding_min(X, W, 0.1)) < 1e-8);
}

TEST_CASE("sparse coding: objective is non-increasing and KKT residual small") {
  Rng rng(5);
  const Matrix X = uniform_matrix(6, 5, rng);
  const Matrix W = uniform_matrix(6, 3, rng);
  double prev = coding_objective(X, W, Matrix::Zero(3, 5), 0.3, 0.2);
  for (int it = 1; it <= 40; ++it) {
    const Code c = sparse_code(X, W, {0.3, 0.2, 1e-300, it});
    CHECK(c.objective <= prev + 1e-12);
    prev = c.objective;
  }
  const CodingOptions opts{0.3, 0.2, 1e-9, 100000};
  const Code c = sparse_code(X, W, opts);
  CHECK(coding_kkt_residual(X, W, c.H, opts) <= opts.tol);
  CHECK(c.H.minCoeff() >= 0.0);
  CHECK(std::abs(c.objective - oracle::coding_min(X, W, 0.3, 0.2)) < 1e-7);
}

TEST_CASE("sparse coding: code norm bound") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = uniform_matrix(5, 3, rng);
    const Matrix W = uniform_matrix(5, 4, rng);
    const double lambda = 0.05 + uniform01(rng);
    const Code c = sparse_code(X, W, {lambda, 0.0, 1e-8, 5000});
    CHECK(c.H.norm() <= X.squaredNorm() / lambda + 1e-12);
  }
}

TEST_CASE("sparse coding: errors") {
  Matrix X = Matrix::Ones(2, 2);
  CHECK_THROWS_WITH_AS(sparse_code(X, Matrix::Zero(2, 2), {}), "sparse_code: zero dictionary",
                       NumericalError);
  X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sparse_code(X, Matrix::Ones(2, 2), {}), NumericalError);
  CHECK_THROWS_AS(sparse_code(Matrix::Ones(3, 2), Matrix::Ones(2, 2), {}), std::invalid_argument);
}

TEST_CASE("aggregate updates") {
  Rng rng(2);
  const Matrix H = uniform_matrix(3, 4, rng);
  const Matrix X = uniform_matrix(5, 4, rng);
  const WeightSchedule sched(1.0);
  AggregateStats s = AggregateStats::zeros(3, 5);
  s = update_aggregates(s, H, X, sched, 0.5);
  CHECK((s.A - H * H.transpose()).norm() < 1e-14);
  CHECK((s.B - H * X.transpose()).norm() < 1e-14);
  CHECK(s.remainder == doctest::Approx(X.squaredNorm() + 0.5 * H.sum()));

  const AggregateStats decayed = update_aggregates(s, Matrix::Zero(3, 4), X, sched, 0.5);
  CHECK((decayed.A - 0.5 * s.A).norm() < 1e-14);
  CHECK((decayed.B - 0.5 * s.B).norm() < 1e-14);

  AggregateStats c = AggregateStats::zeros(3, 5);
  for (int t = 0; t < 37; ++t) c = update_aggregates(c, H, X, sched, 0.5);
  CHECK((c.A - H * H.transpose()).norm() < 1e-12);
  CHECK(c.t == 37);
  CHECK((c.A - c.A.transpose()).norm() == 0.0);

  CHECK_THROWS_AS(update_aggregates(s, Matrix::Zero(2, 4), X, sched, 0.5), std::invalid_argument);
}

TEST_CASE("surrogate loss") {
  Rng rng(4);
  const Matrix W = uniform_matrix(4, 2, rng);
  AggregateStats pure = stats_from(Matrix::Identity(2, 2), Matrix::Zero(2, 4));
  CHECK(surrogate_loss(W, pure) == doctest::Approx(W.squaredNorm()));
  pure.remainder = 3.5;
  CHECK(surrogate_loss(Matrix::Zero(4, 2), pure) == 3.5);

  const Matrix X = uniform_matrix(4, 3, rng);
  const Code c = sparse_code(X, W, {0.2, 0.0, 1e-9, 1000});
  const AggregateStats s1 = update_aggregates(AggregateStats::zeros(2, 4), c.H, X, WeightSchedule(1.0), 0.2);
  const Matrix V = uniform_matrix(4, 2, rng);
  CHECK(surrogate_loss(V, s1) ==
        doctest::Approx((X - V * c.H).squaredNorm() + 0.2 * c.H.sum()).epsilon(1e-12));
}

TEST_CASE("empirical weights sum to one") {
  for (double beta : {0.8, 0.9, 1.0}) {
    const WeightSchedule s(beta);
    for (std::size_t t : {1, 2, 7, 100}) {
      const auto w = empirical_weights(s, t);
      double sum = 0.0;
      for (double v : w) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto balanced = empirical_weights(WeightSchedule(1.0), 5);
  for (double v : balanced) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("empirical loss") {
  Rng rng(6);
  const Matrix X = uniform_matrix(4, 3, rng);
  const Matrix W = uniform_matrix(4, 2, rng);
  const CodingOptions opts{0.1, 0.0, 1e-10, 20000};
  const double single = sparse_code(X, W, opts).objective;
  std::vector<Matrix> one{X};
  CHECK(empirical_loss(W, one, WeightSchedule(1.0), opts) == doctest::Approx(single));
  std::vector<Matrix> many(6, X);
  CHECK(empirical_loss(W, many, WeightSchedule(1.0), opts) == doctest::Approx(single));
}

TEST_CASE("dictionary update: scalar clamp") {
  Dictionary d{Matrix::Zero(1, 1), ConstraintSpec{{ConstraintPiece{0.0, 2.0}}}, 0};
  const AggregateStats s = stats_from(Matrix::Ones(1, 1), 3.0 * Matrix::Ones(1, 1));
  const DictionaryUpdate u = dictionary_update(d, s, {1e-12, 10000});
  CHECK(u.dictionary.W(0, 0) == doctest::Approx(2.0));
  // g(0) − g(2) − (0−2)² = 0 − (4 − 12) − 4 = 4
  CHECK(growth_check(d.W, u.dictionary.W, s) == doctest::Approx(4.0));
  CHECK(ellipsoid_value(u.dictionary.W, d.W, s) <= 1e-12);
}

TEST_CASE("dictionary update: interior minimum is found") {
  Rng rng(9);
  const Matrix Wstar = 0.5 * uniform_matrix(5, 3, rng);
  Dictionary d{Matrix::Zero(5, 3), ConstraintSpec::nonnegative_ball(100.0), 0};
  const AggregateStats s = stats_from(Matrix::Identity(3, 3), Wstar.transpose());
  const DictionaryUpdate u = dictionary_update(d, s, {1e-12, 10000});
  CHECK((u.dictionary.W - Wstar).norm() < 1e-8);
  CHECK_FALSE(u.fallback);
}

TEST_CASE("dictionary update: single convex piece agrees with plain block descent") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix H = uniform_matrix(3, 6, rng);
    const Matrix X = uniform_matrix(4, 6, rng);
    const AggregateStats s = stats_from(H * H.transpose() / 6.0, H * X.transpose() / 6.0);
    Dictionary d{uniform_matrix(4, 3, rng), ConstraintSpec::nonnegative_ball(1.5), 0};
    d.W = project(d.W, d.constraint.pieces[0]);
    const DictionaryUpdate u = dictionary_update(d, s, {1e-12, 20000});
    // Plain projected gradient on the same piece as an independent reference.
    Matrix V = d.W;
    const double L = 2.0 * s.A.norm() + 1e-12;
    for (int it = 0; it < 50000; ++it) {
      V = project(V - (2.0 * V * s.A - 2.0 * s.B.transpose()) / L, d.constraint.pieces[0]);
    }
    CHECK(quadratic_objective(u.dictionary.W, s.A, s.B) <=
          quadratic_objective(V, s.A, s.B) + 1e-7);
    CHECK(ellipsoid_value(u.dictionary.W, d.W, s) <= 1e-8);
  }
}

TEST_CASE("dictionary update: disjoint boxes keep growth and feasibility") {
  Rng rng(21);
  ConstraintSpec two{{ConstraintPiece{0.0, 1.0, 2.0}, ConstraintPiece{2.0, 3.0, 10.0}}};
  int switched = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix H = uniform_matrix(2, 5, rng);
    const Matrix X = 3.0 * uniform_matrix(3, 5, rng);
    const AggregateStats s = stats_from(H * H.transpose(), H * X.transpose());
    const std::size_t piece = uniform_index(rng, 2);
    Dictionary d = random_dictionary(3, 2, two, rng, piece);
    const DictionaryUpdate u = dictionary_update(d, s, {1e-8, 200});
    CHECK(growth_check(d.W, u.dictionary.W, s) >= -1e-8);
    CHECK(u.ellipsoid <= 1e-8);
    CHECK(two.pieces[u.dictionary.active_piece].contains(u.dictionary.W, 1e-9));
    CHECK(quadratic_objective(u.dictionary.W, s.A, s.B) <= quadratic_objective(d.W, s.A, s.B) + 1e-9);
    switched += u.dictionary.active_piece != piece;
  }
  MESSAGE("piece switches: " << switched);
}

TEST_CASE("dictionary update: ridge moves to the ridge minimizer inside the ellipsoid") {
  Rng rng(17);
  const ConstraintSpec box = ConstraintSpec::nonnegative_ball(100.0);
  int interior = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix H = uniform_matrix(3, 6, rng);
    const Matrix X = uniform_matrix(4, 6, rng);
    AggregateStats s = stats_from(H * H.transpose() / 6.0, H * X.transpose() / 6.0);
    s.kappa1 = 0.1;
    Dictionary d = random_dictionary(4, 3, box, rng);
    const DictionaryUpdate u = dictionary_update(d, s, {1e-12, 20000});
    Matrix A = s.A;
    A.diagonal().array() += 0.1;
    // The ridge minimizer Bᵀ(A + κ1 I)⁻¹ is the answer whenever it is feasible.
    const Matrix target = s.B.transpose() * A.inverse();
    if (target.minCoeff() >= 0.0) {
      CHECK((u.dictionary.W - target).norm() < 1e-6);
      ++interior;
    }
    CHECK(u.ellipsoid <= 1e-9);
    CHECK(growth_check(d.W, u.dictionary.W, s) >= -1e-9);
    CHECK(quadratic_objective(u.dictionary.W, A, s.B) <= quadratic_objective(d.W, A, s.B) + 1e-12);
  }
  CHECK(interior >= 5);
}

TEST_CASE("growth check identity") {
  Rng rng(1);
  const Matrix H = uniform_matrix(2, 4, rng);
  const Matrix X = uniform_matrix(3, 4, rng);
  const AggregateStats s = stats_from(H * H.transpose(), H * X.transpose());
  const Matrix W1 = uniform_matrix(3, 2, rng);
  const Matrix W2 = uniform_matrix(3, 2, rng);
  CHECK(growth_check(W1, W1, s) == 0.0);
  CHECK(growth_check(W1, W2, s) == doctest::Approx(-2.0 * ellipsoid_value(W2, W1, s)));
}

TEST_CASE("online factorizer: stream representable by the initial dictionary") {
  Rng rng(17);
  Dictionary init = random_dictionary(6, 2, ConstraintSpec::nonnegative_ball(100.0), rng);
  const Matrix X = init.W * uniform_matrix(2, 8, rng);
  OmfParams p;
  p.coding = {0.0, 0.0, 1e-12, 100000};
  p.dictionary = {1e-10, 500};
  OnlineFactorizer f(init, p);
  double last = 1.0;
  for (int t = 0; t < 50; ++t) last = f.step(X).surrogate;
  CHECK(last < 1e-6);
}

TEST_CASE("online factorizer: domination and descent with history") {
  Rng rng(23);
  OmfParams p;
  p.coding = {0.5, 0.0, 1e-12, 20000};
  p.dictionary = {1e-10, 1000};
  p.keep_history = true;
  OnlineFactorizer f(random_dictionary(4, 2, ConstraintSpec::nonnegative_ball(10.0), rng), p);
  InvariantMonitor monitor(0.5);
  double prev_surrogate = 0.0;
  for (int t = 1; t <= 40; ++t) {
    const Matrix X = uniform_matrix(4, 3, rng);
    const Matrix W_prev = f.dictionary().W;
    const double loss_new = sparse_code(X, W_prev, p.coding).objective;
    const double f_prev = t > 1 ? empirical_loss(W_prev, f.history(), p.schedule, p.coding) : 0.0;
    const StepResult r = f.step(X);
    monitor.observe(X, r, f.stats());
    const double f_now = empirical_loss(f.dictionary().W, f.history(), p.schedule, p.coding);
    CHECK(r.surrogate >= f_now - 1e-8);
    if (t > 1) CHECK(r.surrogate - prev_surrogate <= r.weight * (loss_new - f_prev) + 1e-8);
    prev_surrogate = r.surrogate;
  }
  CHECK(monitor.ok());
}

TEST_CASE("online factorizer rejects an infeasible start") {
  Dictionary d{-Matrix::Ones(2, 2), ConstraintSpec::nonnegative_ball(10.0), 0};
  CHECK_THROWS_AS(OnlineFactorizer(d, OmfParams{}), std::invalid_argument);
}

TEST_CASE("matrix text round trip") {
  Rng rng(31);
  Matrix m = uniform_matrix(3, 4, rng);
  m(0, 0) = 1e-300;
  m(1, 2) = -0.1;
  std::stringstream ss;
  write_matrix(ss, m);
  const Matrix back = read_matrix(ss);
  CHECK(back == m);

  std::stringstream bad("2 2\n1 2\n3 x\n");
  CHECK_THROWS_WITH_AS(read_matrix(bad), doctest::Contains("line 3"), DataError);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(32);
  AggregateStats s = AggregateStats::zeros(2, 3, 0.1);
  s = update_aggregates(s, uniform_matrix(2, 4, rng), uniform_matrix(3, 4, rng), WeightSchedule(0.9), 1.0);
  std::stringstream ss;
  write_checkpoint(ss, s, 0.9);
  const Checkpoint c = read_checkpoint(ss);
  CHECK(c.stats.A == s.A);
  CHECK(c.stats.B == s.B);
  CHECK(c.stats.remainder == s.remainder);
  CHECK(c.stats.t == s.t);
  CHECK(c.stats.kappa1 == s.kappa1);
  CHECK(c.beta == 0.9);
}
