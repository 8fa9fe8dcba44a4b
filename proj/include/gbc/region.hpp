#pragma once

#include "gbc/graph.hpp"
#include "gbc/types.hpp"

#include <functional>
#include <vector>

namespace gbc {

// Region-based regularization family. Every edge (u,v) is a two-node region
// carrying its own distribution; region matrices are indexed by position in
// SparseWeightedGraph::undirected_edges().

enum class RegionMethod { IR, DIR, LSR };

struct RegionConfig {
  RegionMethod method = RegionMethod::LSR;
  int setting = 2;  // 1: clamp subset, priors elsewhere ignored; 2: fit all priors
  double c = 1.0;
  Vector lambda;               // per-node fit weights (setting 2)
  double epsilon = 1e-12;      // probability floor applied before logarithms
  double tol = 1e-6;
  int max_outer_iter = 500;
  double inner_step = 0.5;     // exponentiated-gradient step (IR setting 2)
  int max_inner_iter = 200;
  double inner_tol = 1e-8;
};

struct RegionResult {
  Matrix p;
  int outer_iterations = 0;
  bool converged = false;
  bool inner_converged = true;        // IR setting 2 only
  std::vector<int> retained_rows;     // nodes with no fit weight and no neighbors
  std::vector<double> objective_trace;  // objective after each outer step
};

// Region steps. IR/LSR: arithmetic mean per edge; DIR: epsilon-floored
// normalized geometric mean per edge.
Matrix ir_region_update(const Matrix& p, const SparseWeightedGraph& g);
Matrix dir_region_update(const Matrix& p, const SparseWeightedGraph& g, double epsilon);

// Shared DIR/LSR node step: p_i = (mu_i p0_i + sum_j w_ij rbar_ij) / (mu_i + d_ii)
// with mu_i = C * lambda_ii. Rows not in `active` are left untouched.
Matrix node_update_shared(const SparseWeightedGraph& g, const Matrix& regions, const Matrix& p0,
                          const Vector& lambda, double c, const std::vector<int>& active,
                          const Matrix& current);

// IR setting-1 node step: normalized weighted geometric mean of the incident
// region distributions (the exact minimizer of the KL regularizer).
Matrix ir_node_update_setting1(const SparseWeightedGraph& g, const Matrix& regions, double epsilon,
                               const std::vector<int>& active, const Matrix& current);

// IR setting-2 node step: per-node exponentiated-gradient minimization of
// C lambda_i KL(p0_i || p_i) + sum_j w_ij KL(p_i || rbar_ij). Returns false
// through *inner_converged when an inner solve hits its iteration cap.
Matrix ir_node_update_setting2(const SparseWeightedGraph& g, const Matrix& regions, const Matrix& p0,
                               const Vector& lambda, double c, const RegionConfig& cfg,
                               const std::vector<int>& active, const Matrix& current,
                               bool* inner_converged = nullptr);

// Objective of the regularized problem for the given method: fit term
// C sum_i lambda_i D(p0_i, p_i) (setting 2 only) plus the region term
// sum_edges w [D(p_i, rbar) + D(p_j, rbar)], with D squared error for LSR,
// KL(p || rbar) for IR and KL(rbar || p) transposed form for DIR.
double region_objective(const SparseWeightedGraph& g, const RegionConfig& cfg, const Matrix& p,
                        const Matrix& regions, const Matrix& p0, const std::vector<int>& active);

// Alternating region/node optimization until the node distributions move
// less than tol in sup norm. Setting 1 keeps rows of `clamp_set` fixed.
// The observer, when set, sees the state after every half-step.
RegionResult run_region_method(const SparseWeightedGraph& g, const RegionConfig& cfg,
                               const Matrix& p0, const std::vector<int>& clamp_set,
                               const std::function<void(int, const Matrix&)>& observer = nullptr);

}  // namespace gbc
