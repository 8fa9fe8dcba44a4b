#pragma once

#include "gbc/graph.hpp"
#include "gbc/types.hpp"

#include <functional>
#include <vector>

namespace gbc {

enum class WvrnVariant {
  Base,  // Setting 1: subset clamped, rest initialized to the class prior
  V1,    // Setting 2: initialize from external priors, no clamping
  V2,    // Setting 2: dongle blend q~ = lambda p0 + (1 - lambda) q
};

struct WvrnConfig {
  WvrnVariant variant = WvrnVariant::Base;
  double nu = 0.95;  // annealing decay, robust in (0.9, 1)
  double tol = 1e-6;
  int max_iter = 10000;
  double beta_floor = 1e-12;  // annealing has effectively stopped below this
};

struct WvrnResult {
  Matrix p;
  int iterations = 0;
  bool converged = false;
  std::vector<int> unanchored;  // isolated nodes whose vote is undefined; kept at init
};

// Relaxation-labeled weighted-vote relational classifier.
// Per step, for every free node: q_i = sum_j w_ij p_j / d_ii, then
// p_i <- beta q_i + (1 - beta) p_i with beta = nu^t (beta starts at 1).
// Base variant: rows of `clamp_set` stay fixed at their p0 rows; free rows
// start at the empirical class prior of the clamp set's derived labels.
// An optional observer sees each intermediate state.
WvrnResult wvrn(const SparseWeightedGraph& g, const Matrix& p0,
                const std::vector<int>& clamp_set, const WvrnConfig& cfg,
                const Vector& lambda = Vector(),
                const std::function<void(int, const Matrix&)>& observer = nullptr);

}  // namespace gbc
