#pragma once

#include "gbc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gbc {

// Inaccurate-classifier noise model: the true-class probability is drawn
// uniformly from [p_min, p_max] and the remaining mass is split across the
// other classes proportionally to fresh uniform draws.
struct NoiseSpec {
  double p_min = 0.0;
  double p_max = 1.0;
  std::uint64_t seed = 0;
};

// One substream per node, so generation is order-independent.
Matrix generate_noisy_priors(const std::vector<int>& true_labels, int num_classes,
                             const NoiseSpec& spec);

// score_i = max_k p_ik, in [1/K, 1].
Vector mps_scores(const Matrix& p);

// score_i = 1 - E(p_i)/ln K with 0*log 0 = 0, in [0, 1].
Vector ebs_scores(const Matrix& p);

enum class SelectionScheme { MPS, EBS };

Vector scheme_scores(const Matrix& p, SelectionScheme scheme);

struct SelectionCriterion {
  enum class Kind { Threshold, TopPercent } kind = Kind::TopPercent;
  double value = 100.0;  // p_th for Threshold, M for TopPercent

  static SelectionCriterion Threshold(double p_th) { return {Kind::Threshold, p_th}; }
  static SelectionCriterion TopPercent(double m) { return {Kind::TopPercent, m}; }
};

struct SelectionResult {
  std::vector<int> selected;        // ascending node indices
  std::vector<int> derived_labels;  // per selected node, argmax of its prior row
};

// Setting-1 subset selection. With ensure_coverage, every class that appears
// among the derived labels of the full P gets at least one member in S (the
// highest-scoring node of that class is force-added).
SelectionResult select_subset(const Vector& scores, SelectionCriterion criterion,
                              const Matrix& p, bool ensure_coverage);

// Setting 2: lambda_ii is the scheme score of every node.
// Setting 1: lambda_ii = 1 on S, 0 elsewhere.
Vector lambda_setting2(const Matrix& p, SelectionScheme scheme);
Vector lambda_setting1(int n, const std::vector<int>& selected);

// Fraction of eval_set nodes whose argmax prediction matches truth.
double accuracy(const Matrix& p_hat, const std::vector<int>& truth,
                const std::vector<int>& eval_set);
double accuracy(const Matrix& p_hat, const std::vector<int>& truth);

}  // namespace gbc
