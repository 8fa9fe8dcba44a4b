#include "gbc/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gbc {

Matrix generate_noisy_priors(const std::vector<int>& true_labels, int num_classes,
                             const NoiseSpec& spec) {
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  if (!(spec.p_min >= 0.0 && spec.p_min <= spec.p_max && spec.p_max <= 1.0)) {
    throw std::invalid_argument("require 0 <= p_min <= p_max <= 1");
  }
  const int n = static_cast<int>(true_labels.size());
  Matrix p = Matrix::Zero(n, num_classes);
  for (int i = 0; i < n; ++i) {
    int c = true_labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= num_classes) throw std::out_of_range("true label out of range");
    Rng rng(spec.seed, static_cast<std::uint64_t>(i));
    double p_label = rng.uniform(spec.p_min, spec.p_max);
    double rest = 1.0 - p_label;

    double psi = 0.0;
    std::vector<double> pr(static_cast<std::size_t>(num_classes), 0.0);
    for (int k = 0; k < num_classes; ++k) {
      if (k == c) continue;
      pr[static_cast<std::size_t>(k)] = rng.uniform();
      psi += pr[static_cast<std::size_t>(k)];
    }

    p(i, c) = p_label;
    int largest = -1;
    double assigned = 0.0;
    for (int k = 0; k < num_classes; ++k) {
      if (k == c) continue;
      double v = psi > 0.0 ? pr[static_cast<std::size_t>(k)] * rest / psi
                           : rest / (num_classes - 1);
      p(i, k) = v;
      assigned += v;
      if (largest < 0 || v > p(i, largest)) largest = k;
    }
    // Absorb rounding residue into the largest off-class entry so the row
    // sums to 1 and the true-class entry stays exactly at its drawn value.
    p(i, largest) += rest - assigned;
  }
  return p;
}

Vector mps_scores(const Matrix& p) {
  return p.rowwise().maxCoeff();
}

Vector ebs_scores(const Matrix& p) {
  const double e_max = std::log(static_cast<double>(p.cols()));
  Vector s(p.rows());
  for (int i = 0; i < p.rows(); ++i) {
    double entropy = 0.0;
    for (int k = 0; k < p.cols(); ++k) {
      double v = p(i, k);
      if (v > 0.0) entropy -= v * std::log(v);
    }
    s(i) = 1.0 - entropy / e_max;
  }
  return s;
}

Vector scheme_scores(const Matrix& p, SelectionScheme scheme) {
  return scheme == SelectionScheme::MPS ? mps_scores(p) : ebs_scores(p);
}

SelectionResult select_subset(const Vector& scores, SelectionCriterion criterion,
                              const Matrix& p, bool ensure_coverage) {
  const int n = static_cast<int>(scores.size());
  if (p.rows() != n) throw std::invalid_argument("scores/priors size mismatch");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores(a) > scores(b); });

  std::vector<char> in_s(static_cast<std::size_t>(n), 0);
  if (criterion.kind == SelectionCriterion::Kind::TopPercent) {
    if (!(criterion.value > 0.0 && criterion.value <= 100.0)) {
      throw std::invalid_argument("top-percent M must lie in (0,100]");
    }
    int count = std::max(1, static_cast<int>(std::floor(criterion.value * n / 100.0)));
    count = std::min(count, n);
    for (int r = 0; r < count; ++r) in_s[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
  } else {
    if (!(criterion.value > 0.0 && criterion.value <= 1.0)) {
      throw std::invalid_argument("threshold must lie in (0,1]");
    }
    for (int i = 0; i < n; ++i) {
      if (scores(i) >= criterion.value) in_s[static_cast<std::size_t>(i)] = 1;
    }
  }

  std::vector<int> all_derived = derived_labels(p);
  if (ensure_coverage) {
    std::vector<char> covered(static_cast<std::size_t>(p.cols()), 0);
    std::vector<char> present(static_cast<std::size_t>(p.cols()), 0);
    for (int i = 0; i < n; ++i) {
      present[static_cast<std::size_t>(all_derived[static_cast<std::size_t>(i)])] = 1;
      if (in_s[static_cast<std::size_t>(i)]) covered[static_cast<std::size_t>(all_derived[static_cast<std::size_t>(i)])] = 1;
    }
    for (int k = 0; k < p.cols(); ++k) {
      if (!present[static_cast<std::size_t>(k)] || covered[static_cast<std::size_t>(k)]) continue;
      for (int idx : order) {
        if (all_derived[static_cast<std::size_t>(idx)] == k) {
          in_s[static_cast<std::size_t>(idx)] = 1;
          break;
        }
      }
    }
  }

  SelectionResult result;
  for (int i = 0; i < n; ++i) {
    if (in_s[static_cast<std::size_t>(i)]) {
      result.selected.push_back(i);
      result.derived_labels.push_back(all_derived[static_cast<std::size_t>(i)]);
    }
  }
  if (result.selected.empty()) throw std::runtime_error("subset selection produced an empty set");
  return result;
}

Vector lambda_setting2(const Matrix& p, SelectionScheme scheme) {
  return scheme_scores(p, scheme);
}

Vector lambda_setting1(int n, const std::vector<int>& selected) {
  Vector lambda = Vector::Zero(n);
  for (int i : selected) lambda(i) = 1.0;
  return lambda;
}

double accuracy(const Matrix& p_hat, const std::vector<int>& truth,
                const std::vector<int>& eval_set) {
  if (eval_set.empty()) throw std::invalid_argument("empty evaluation set");
  int hits = 0;
  for (int i : eval_set) {
    if (argmax_row(p_hat, i) == truth[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(eval_set.size());
}

double accuracy(const Matrix& p_hat, const std::vector<int>& truth) {
  std::vector<int> all(truth.size());
  std::iota(all.begin(), all.end(), 0);
  return accuracy(p_hat, truth, all);
}

}  // namespace gbc
