#pragma once

#include "gbc/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gbc {

// [lo, 2lo, 4lo, ...] truncated at the last value <= hi * (1 + 1e-9).
std::vector<double> make_doubling_grid(double lo, double hi);

struct CVRule {
  enum class Kind { Best, SmallestWithinPct } kind = Kind::Best;
  double delta_pct = 5.0;
  bool absolute_slack = false;  // default: relative, acc >= (1 - delta/100) * best

  static CVRule Best() { return {Kind::Best, 0.0, false}; }
  static CVRule SmallestWithinPct(double delta, bool absolute = false) {
    return {Kind::SmallestWithinPct, delta, absolute};
  }
};

// Index into an ascending grid chosen by the rule from per-grid-point mean
// accuracies. Best breaks ties toward the smallest grid value.
int apply_cv_rule(const std::vector<double>& mean_accuracies, const CVRule& rule);

struct CVPlan {
  int folds = 5;
  std::vector<double> c_grid;
  CVRule rule = CVRule::SmallestWithinPct(5.0);
  std::vector<int> eval_nodes;
  std::uint64_t seed = 0;
};

// Disjoint cover of `nodes` into k folds with sizes differing by at most one,
// deterministic given the seed. Stratified by label when every class present
// has at least k members, unstratified otherwise.
std::vector<std::vector<int>> make_folds(const std::vector<int>& nodes, int k,
                                         const std::vector<int>& labels, std::uint64_t seed);

// Runs the method once per (grid value, fold) with the fold held out and
// scores its predictions against the noisy derived labels of the held-out
// nodes; truth is never consulted. The runner receives a grid value and the
// held-out node set and must return one predicted class per held-out node,
// in order, with the held-out nodes' fit weights zeroed on its side.
struct CVResult {
  double chosen_c = 0.0;
  int chosen_index = -1;
  std::vector<double> mean_accuracies;            // per grid value
  std::vector<std::vector<double>> fold_accuracies;  // [grid][fold]
};

using CVRunner = std::function<std::vector<int>(double c, const std::vector<int>& held_out)>;

CVResult cv_select(const CVRunner& runner, const CVPlan& plan,
                   const std::vector<int>& derived_labels);

}  // namespace gbc
