#pragma once

#include "gbc/graph.hpp"
#include "gbc/types.hpp"

#include <vector>

namespace gbc {

// Shared solver defaults; the originating formulations give neither.
inline constexpr double kDefaultTol = 1e-6;
inline constexpr int kDefaultMaxIter = 1000;
inline constexpr double kDivergenceGuard = 1e12;

struct SolveResult {
  Matrix f;
  bool converged = false;
  int iterations = 0;
};

// Z = V Lambda Y with v_ii = sum_k d_ii lambda_ii y_ik / eta_k and
// eta_k = sum_i d_ii lambda_ii y_ik, so every column of Z sums to 1.
// With node regularization off, V = I and Z = Lambda Y.
struct NormalizedLabelData {
  Vector v;  // node regularization weights v_ii
  Matrix z;  // n x K
};

NormalizedLabelData build_node_regularization(const SparseWeightedGraph& g, const Vector& lambda,
                                              const Matrix& y, bool use_node_regularization = true);

struct QuadraticConfig {
  double c = 1.0;
  LaplacianKind laplacian_kind = LaplacianKind::Unnormalized;
  Vector h;       // per-node error weights h_ii > 0
  Vector lambda;  // label degrees in [0,1]
  double tol = kDefaultTol;
  int max_iter = kDefaultMaxIter;
};

// Generic quadratic objective value: sum_k [ C (F_k - Z_k)^T H (F_k - Z_k) + F_k^T L F_k ].
double quadratic_objective(const SparseWeightedGraph& g, const QuadraticConfig& cfg,
                           const Matrix& z, const Matrix& f);

// Fixed point F <- Z - (1/C) H^-1 L F, iterated per column to sup-norm tol.
SolveResult solve_generic(const SparseWeightedGraph& g, const QuadraticConfig& cfg, const Matrix& z);

// Dense solve F_k = C (L + C H)^-1 H Z_k. Test oracle; O(n^3).
Matrix closed_form_oracle(const SparseWeightedGraph& g, const QuadraticConfig& cfg, const Matrix& z);

// Harmonic-field fixed point F_k = (I - Lambda) D^-1 W F_k + Lambda Z_k.
// Rows with lambda_ii = 1 are hard-clamped to their Z rows (the infinite
// error-weight limit), never iterated.
SolveResult solve_gfhf(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z,
                       double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

// Label-spreading fixed point F <- gamma S F + (1 - gamma) Lambda Z with
// S = D^-1/2 W D^-1/2 and gamma = 1/(1+C). Contraction for any C > 0.
SolveResult solve_lgc(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z, double c,
                      double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

// Dense counterparts of the two fixed points above, for tests.
Matrix gfhf_oracle(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z);
Matrix lgc_oracle(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z, double c);

// Dense W / D^-1 W / S / L builders shared by the oracles and tests.
Matrix dense_adjacency(const SparseWeightedGraph& g);
Matrix dense_laplacian(const SparseWeightedGraph& g, LaplacianKind kind);
Matrix dense_row_normalized(const SparseWeightedGraph& g);
Matrix dense_symmetric_normalized(const SparseWeightedGraph& g);

}  // namespace gbc
