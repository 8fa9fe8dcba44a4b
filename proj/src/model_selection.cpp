#include "gbc/model_selection.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gbc {

std::vector<double> make_doubling_grid(double lo, double hi) {
  if (!(lo > 0.0) || lo >= hi) throw std::invalid_argument("require 0 < lo < hi");
  std::vector<double> grid;
  const double cap = hi * (1.0 + 1e-9);
  for (double v = lo; v <= cap; v *= 2.0) grid.push_back(v);
  return grid;
}

int apply_cv_rule(const std::vector<double>& mean_accuracies, const CVRule& rule) {
  if (mean_accuracies.empty()) throw std::invalid_argument("empty accuracy curve");
  int best = 0;
  for (int i = 1; i < static_cast<int>(mean_accuracies.size()); ++i) {
    if (mean_accuracies[static_cast<std::size_t>(i)] > mean_accuracies[static_cast<std::size_t>(best)]) best = i;
  }
  if (rule.kind == CVRule::Kind::Best) return best;

  double best_acc = mean_accuracies[static_cast<std::size_t>(best)];
  double threshold = rule.absolute_slack ? best_acc - rule.delta_pct / 100.0
                                         : (1.0 - rule.delta_pct / 100.0) * best_acc;
  for (int i = 0; i < static_cast<int>(mean_accuracies.size()); ++i) {
    if (mean_accuracies[static_cast<std::size_t>(i)] >= threshold) return i;
  }
  return best;  // unreachable: best always meets its own threshold
}

std::vector<std::vector<int>> make_folds(const std::vector<int>& nodes, int k,
                                         const std::vector<int>& labels, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("need at least two folds");
  if (nodes.size() < static_cast<std::size_t>(k)) throw std::invalid_argument("fewer nodes than folds");

  // Group by label; stratify only when every class present has >= k members.
  std::map<int, std::vector<int>> by_label;
  for (int i : nodes) by_label[labels[static_cast<std::size_t>(i)]].push_back(i);
  bool stratify = true;
  for (const auto& [label, members] : by_label) {
    if (members.size() < static_cast<std::size_t>(k)) stratify = false;
  }

  Rng rng(seed, 0x666f6c6473ULL);
  auto shuffled = [&](std::vector<int> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(rng.below(i))]);
    }
    return v;
  };

  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  if (stratify) {
    std::size_t cursor = 0;
    for (auto& [label, members] : by_label) {
      for (int i : shuffled(members)) folds[cursor++ % static_cast<std::size_t>(k)].push_back(i);
    }
  } else {
    std::size_t cursor = 0;
    for (int i : shuffled(nodes)) folds[cursor++ % static_cast<std::size_t>(k)].push_back(i);
  }
  for (const auto& fold : folds) {
    if (fold.empty()) throw std::runtime_error("empty cross-validation fold");
  }
  return folds;
}

CVResult cv_select(const CVRunner& runner, const CVPlan& plan,
                   const std::vector<int>& derived_labels) {
  if (plan.c_grid.empty()) throw std::invalid_argument("empty C grid");
  for (std::size_t i = 1; i < plan.c_grid.size(); ++i) {
    if (plan.c_grid[i] <= plan.c_grid[i - 1]) throw std::invalid_argument("grid must be strictly ascending");
  }
  auto folds = make_folds(plan.eval_nodes, plan.folds, derived_labels, plan.seed);

  CVResult result;
  result.fold_accuracies.resize(plan.c_grid.size());
  for (std::size_t ci = 0; ci < plan.c_grid.size(); ++ci) {
    double mean = 0.0;
    for (const auto& held_out : folds) {
      std::vector<int> predicted = runner(plan.c_grid[ci], held_out);
      if (predicted.size() != held_out.size()) throw std::runtime_error("runner prediction count mismatch");
      int hits = 0;
      for (std::size_t j = 0; j < held_out.size(); ++j) {
        if (predicted[j] == derived_labels[static_cast<std::size_t>(held_out[j])]) ++hits;
      }
      double acc = static_cast<double>(hits) / static_cast<double>(held_out.size());
      result.fold_accuracies[ci].push_back(acc);
      mean += acc;
    }
    result.mean_accuracies.push_back(mean / static_cast<double>(folds.size()));
  }
  result.chosen_index = apply_cv_rule(result.mean_accuracies, plan.rule);
  result.chosen_c = plan.c_grid[static_cast<std::size_t>(result.chosen_index)];
  return result;
}

}  // namespace gbc
