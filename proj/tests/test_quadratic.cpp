#include "gbc/quadratic.hpp"
#include "gbc/priors.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace gbc;
using testutil::max_abs_diff;

namespace {

// Draw C large enough that the generic fixed point is a contraction:
// rho(H^-1 L) <= ||H^-1 L||_inf <= 2 d_max / h_min.
double safe_c(const SparseWeightedGraph& g, const Vector& h, Rng& rng) {
  double bound = 2.0 * g.degrees().maxCoeff() / h.minCoeff();
  return bound * rng.uniform(1.2, 3.0) + 0.1;
}

QuadraticConfig random_config(const SparseWeightedGraph& g, Rng& rng) {
  QuadraticConfig cfg;
  cfg.laplacian_kind = rng.uniform() < 0.5 ? LaplacianKind::Unnormalized : LaplacianKind::Normalized;
  cfg.h = Vector::NullaryExpr(g.num_nodes(), [&](Eigen::Index) { return rng.uniform(0.5, 2.0); });
  cfg.lambda = Vector::NullaryExpr(g.num_nodes(), [&](Eigen::Index) { return rng.uniform(); });
  cfg.c = safe_c(g, cfg.h, rng);
  cfg.tol = 1e-10;
  cfg.max_iter = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("node regularization: one labeled node per class gives hard Z") {
  auto g = SparseWeightedGraph::FromTriples(3, std::vector<EdgeTriple>{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  Matrix y = Matrix::Zero(3, 2);
  y(0, 0) = 1.0;
  y(2, 1) = 1.0;
  Vector lambda(3);
  lambda << 1.0, 0.0, 1.0;
  auto z = build_node_regularization(g, lambda, y);
  CHECK(z.z(0, 0) == doctest::Approx(1.0));
  CHECK(z.z(2, 1) == doctest::Approx(1.0));
  CHECK(z.z.col(0).sum() == doctest::Approx(1.0));
  CHECK(z.z.col(1).sum() == doctest::Approx(1.0));
}

TEST_CASE("node regularization weights by degree within a class") {
  // two class-0 nodes with degrees 1 and 3
  auto g = SparseWeightedGraph::FromTriples(
      5, std::vector<EdgeTriple>{{0, 2, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}, {1, 4, 1.0}});
  Matrix y = Matrix::Zero(5, 2);
  y(0, 0) = 1.0;
  y(1, 0) = 1.0;
  y(2, 1) = 1.0;
  Vector lambda = Vector::Zero(5);
  lambda(0) = lambda(1) = lambda(2) = 1.0;
  auto z = build_node_regularization(g, lambda, y);
  CHECK(z.z(0, 0) == doctest::Approx(0.25));
  CHECK(z.z(1, 0) == doctest::Approx(0.75));
}

TEST_CASE("node regularization off gives Z = Lambda Y") {
  Rng rng(3);
  auto g = testutil::random_graph(6, 0.5, rng, true);
  Matrix y = testutil::random_stochastic(6, 3, rng);
  Vector lambda = Vector::NullaryExpr(6, [&](Eigen::Index) { return rng.uniform(); });
  auto z = build_node_regularization(g, lambda, y, false);
  CHECK(max_abs_diff(z.z, lambda.asDiagonal() * y) == 0.0);
}

TEST_CASE("node regularization Z columns sum to one for hard labeled subsets") {
  Rng rng(5);
  auto g = testutil::random_graph(10, 0.4, rng, true);
  Matrix y = Matrix::Zero(10, 4);
  Vector lambda = Vector::Zero(10);
  for (int i = 0; i < 10; ++i) {
    // hard labels on a labeled subset, lambda in {0,1}: every class covered
    if (i < 4 || rng.uniform() < 0.5) {
      lambda(i) = 1.0;
      y(i, i % 4) = 1.0;
    }
  }
  auto z = build_node_regularization(g, lambda, y);
  for (int k = 0; k < 4; ++k) CHECK(z.z.col(k).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("node regularization rejects unsupported classes") {
  auto g = SparseWeightedGraph::FromTriples(2, std::vector<EdgeTriple>{{0, 1, 1.0}});
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = 1.0;
  y(1, 1) = 1.0;
  Vector lambda(2);
  lambda << 1.0, 0.0;  // class 1 has no weighted support
  CHECK_THROWS_AS(build_node_regularization(g, lambda, y), std::runtime_error);
}

TEST_CASE("solve_generic on edgeless graph returns Z") {
  auto g = SparseWeightedGraph::FromTriples(4, std::vector<EdgeTriple>{});
  QuadraticConfig cfg;
  cfg.c = 2.0;
  cfg.h = Vector::Ones(4);
  cfg.lambda = Vector::Ones(4);
  Rng rng(9);
  Matrix z = testutil::random_matrix(4, 2, rng);
  auto r = solve_generic(g, cfg, z);
  CHECK(r.converged);
  CHECK(max_abs_diff(r.f, z) == 0.0);
}

TEST_CASE("solve_generic matches the closed-form oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 15; ++rep) {
    int n = 4 + static_cast<int>(rng.below(7));
    auto g = testutil::random_graph(n, 0.5, rng, true);
    auto cfg = random_config(g, rng);
    Matrix z = testutil::random_matrix(n, 3, rng);
    auto r = solve_generic(g, cfg, z);
    CHECK(r.converged);
    CHECK(max_abs_diff(r.f, closed_form_oracle(g, cfg, z)) < 1e-6);
  }
}

TEST_CASE("solve_generic objective is non-increasing across iterates") {
  Rng rng(21);
  auto g = testutil::random_graph(8, 0.5, rng, true);
  auto cfg = random_config(g, rng);
  Matrix z = testutil::random_matrix(8, 2, rng);

  // replicate the iteration and track the objective
  Matrix f = z;
  double prev = quadratic_objective(g, cfg, z, f);
  for (int it = 0; it < 50; ++it) {
    Matrix lf = g.apply_laplacian(cfg.laplacian_kind, f);
    f = z - (lf.array().colwise() * (1.0 / (cfg.c * cfg.h.array()))).matrix();
    double q = quadratic_objective(g, cfg, z, f);
    if (it > 0) CHECK(q <= prev + 1e-10);
    prev = q;
  }
}

TEST_CASE("large C pins the solution to Z") {
  Rng rng(25);
  auto g = testutil::random_graph(8, 0.5, rng, true);
  QuadraticConfig cfg;
  cfg.laplacian_kind = LaplacianKind::Normalized;
  cfg.h = Vector::Ones(8);
  cfg.lambda = Vector::Ones(8);
  cfg.c = 1e6;
  Matrix z = testutil::random_stochastic(8, 2, rng);
  auto r = solve_generic(g, cfg, z);
  CHECK(r.converged);
  CHECK(max_abs_diff(r.f, closed_form_oracle(g, cfg, z)) < 1e-6);
  CHECK(max_abs_diff(r.f, z) < 1e-4);
}

TEST_CASE("non-convergence is reported, not hidden") {
  Rng rng(29);
  auto g = testutil::random_graph(8, 0.6, rng, true);
  QuadraticConfig cfg;
  cfg.h = Vector::Ones(8);
  cfg.lambda = Vector::Ones(8);
  cfg.c = 1e-6;  // far below the contraction threshold
  cfg.max_iter = 200;
  Matrix z = testutil::random_matrix(8, 2, rng);
  auto r = solve_generic(g, cfg, z);
  CHECK_FALSE(r.converged);
}

TEST_CASE("gfhf: two nodes, one clamped, harmonic fill-in") {
  auto g = SparseWeightedGraph::FromTriples(2, std::vector<EdgeTriple>{{0, 1, 1.0}});
  Vector lambda(2);
  lambda << 1.0, 0.0;
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  auto r = solve_gfhf(g, lambda, z);
  CHECK(r.converged);
  CHECK(r.f(0, 0) == 1.0);  // clamped bit-exact
  CHECK(r.f(1, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gfhf with uniform lambda reproduces the dongle form") {
  Rng rng(33);
  auto g = testutil::random_graph(9, 0.5, rng, true);
  Vector lambda = Vector::Constant(9, 0.5);
  Matrix z = testutil::random_stochastic(9, 3, rng);
  auto r = solve_gfhf(g, lambda, z, 1e-10, 20000);
  CHECK(r.converged);
  CHECK(max_abs_diff(r.f, gfhf_oracle(g, lambda, z)) < 1e-6);
}

TEST_CASE("gfhf harmonicity at unlabeled nodes") {
  Rng rng(37);
  auto g = testutil::random_graph(12, 0.5, rng, true);
  Vector lambda = Vector::Zero(12);
  lambda(0) = lambda(5) = lambda(11) = 1.0;
  Matrix z = Matrix::Zero(12, 2);
  z(0, 0) = z(5, 1) = z(11, 0) = 1.0;
  auto r = solve_gfhf(g, lambda, z, 1e-10, 50000);
  CHECK(r.converged);
  Matrix avg = g.apply_row_normalized(r.f);
  for (int i = 0; i < 12; ++i) {
    if (lambda(i) == 0.0) CHECK((r.f.row(i) - avg.row(i)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("gfhf rejects an unanchored problem") {
  auto g = SparseWeightedGraph::FromTriples(2, std::vector<EdgeTriple>{{0, 1, 1.0}});
  CHECK_THROWS_AS(solve_gfhf(g, Vector::Zero(2), Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("gfhf output is invariant to global edge-weight scaling") {
  Rng rng(41);
  auto g1 = testutil::random_graph(8, 0.5, rng, true);
  std::vector<EdgeTriple> scaled;
  const auto& edges = g1.undirected_edges();
  const auto& weights = g1.undirected_weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    scaled.push_back({edges[e].first, edges[e].second, 7.5 * weights[e]});
  }
  auto g2 = SparseWeightedGraph::FromTriples(8, scaled);
  Vector lambda = Vector::NullaryExpr(8, [&](Eigen::Index) { return rng.uniform(0.1, 0.9); });
  Matrix z = testutil::random_stochastic(8, 2, rng);
  auto r1 = solve_gfhf(g1, lambda, z, 1e-10, 20000);
  auto r2 = solve_gfhf(g2, lambda, z, 1e-10, 20000);
  CHECK(max_abs_diff(r1.f, r2.f) < 1e-9);
}

TEST_CASE("lgc: edgeless graph gives (1-gamma) Lambda Z") {
  auto g = SparseWeightedGraph::FromTriples(3, std::vector<EdgeTriple>{});
  Vector lambda(3);
  lambda << 1.0, 0.5, 0.0;
  Matrix z = Matrix::Ones(3, 2);
  double c = 3.0;
  auto r = solve_lgc(g, lambda, z, c);
  CHECK(r.converged);
  double gamma = 1.0 / (1.0 + c);
  CHECK(max_abs_diff(r.f, (1.0 - gamma) * (lambda.asDiagonal() * z)) < 1e-12);
}

TEST_CASE("lgc matches its dense oracle") {
  Rng rng(45);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 4 + static_cast<int>(rng.below(7));
    auto g = testutil::random_graph(n, 0.5, rng, true);
    Vector lambda = Vector::NullaryExpr(n, [&](Eigen::Index) { return rng.uniform(); });
    Matrix z = testutil::random_stochastic(n, 3, rng);
    double c = rng.uniform(0.05, 20.0);
    auto r = solve_lgc(g, lambda, z, c, 1e-10, 20000);
    CHECK(r.converged);
    CHECK(max_abs_diff(r.f, lgc_oracle(g, lambda, z, c)) < 1e-6);
  }
}

TEST_CASE("lgc iterate differences contract at rate <= gamma") {
  Rng rng(49);
  auto g = testutil::random_graph(10, 0.5, rng, true);
  Vector lambda = Vector::Ones(10);
  Matrix z = testutil::random_stochastic(10, 2, rng);
  double c = 1.0, gamma = 0.5;

  Matrix f = lambda.asDiagonal() * z;
  Matrix anchor = (1.0 - gamma) * f;
  double prev_delta = -1.0;
  for (int it = 0; it < 40; ++it) {
    Matrix next = gamma * g.apply_symmetric_normalized(f) + anchor;
    double delta = max_abs_diff(next, f);
    if (prev_delta > 1e-14) CHECK(delta <= gamma * prev_delta + 1e-9);
    prev_delta = delta;
    f = next;
  }
}

TEST_CASE("gfhf limit of the generic solver with H = D Lambda (I-Lambda)^-1") {
  Rng rng(53);
  auto g = testutil::random_graph(8, 0.6, rng, true);
  Vector lambda = Vector::NullaryExpr(8, [&](Eigen::Index) { return rng.uniform(0.3, 0.9); });
  Matrix z = testutil::random_stochastic(8, 2, rng);

  QuadraticConfig cfg;
  cfg.laplacian_kind = LaplacianKind::Unnormalized;
  cfg.c = 1.0;
  cfg.h = Vector::NullaryExpr(8, [&](Eigen::Index i) {
    return g.degree(static_cast<int>(i)) * lambda(i) / (1.0 - lambda(i));
  });
  cfg.lambda = lambda;
  Matrix via_generic = closed_form_oracle(g, cfg, z);
  auto r = solve_gfhf(g, lambda, z, 1e-12, 50000);
  CHECK(max_abs_diff(via_generic, r.f) < 1e-6);
}
