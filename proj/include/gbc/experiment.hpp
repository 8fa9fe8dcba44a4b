#pragma once

#include "gbc/graph.hpp"
#include "gbc/model_selection.hpp"
#include "gbc/priors.hpp"
#include "gbc/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gbc {

enum class Method { GFHF, LGC, WvRN, WvRNV1, WvRNV2, IR, DIR, LSR };

std::string method_name(Method m);
Method parse_method(const std::string& name);

// Planted-partition generator standing in for benchmark graphs: Bernoulli
// edges with probability p_within inside a block and p_across between
// blocks; truth labels are block ids.
struct SyntheticBlockSpec {
  std::vector<int> blocks;
  double p_within = 0.1;
  double p_across = 0.01;
  double weight = 1.0;
  std::uint64_t seed = 0;
};

struct BlockGraph {
  SparseWeightedGraph graph;
  std::vector<int> truth;
};

BlockGraph generate_block_graph(const SyntheticBlockSpec& spec);

enum class EvalScope { AllNodes, LabeledSubset };

struct ExperimentSpec {
  std::vector<Method> methods;
  int setting = 2;
  SelectionScheme scheme = SelectionScheme::EBS;
  std::vector<double> subset_percents = {10, 20, 30, 40, 50, 60, 70, 80, 90};
  int trials = 100;
  int ir_trials = -1;  // IR may use fewer trials; -1 means same as `trials`
  std::uint64_t seed = 0;
  double p_min = 0.4;
  double p_max = 0.99;
  EvalScope eval_scope = EvalScope::AllNodes;
  CVRule cv_rule = CVRule::SmallestWithinPct(5.0);
  int cv_folds = 5;
  // Diagnostics, written under out_dir when enabled.
  std::string out_dir;
  bool cv_trace = false;
  bool objective_trace = false;
  bool dump_scores = false;
};

struct RunRecord {
  Method method = Method::LSR;
  int setting = 2;
  SelectionScheme scheme = SelectionScheme::EBS;
  double subset_pct = 0.0;
  double c_chosen = 1.0;
  std::uint64_t trial_seed = 0;
  double accuracy = 0.0;
  double initial_accuracy = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;  // diagnostic only; not serialized into records.csv
};

// Full protocol: per trial, generate noisy priors (or reuse `fixed_priors`),
// sweep subset sizes, cross-validate C where the method calls for it, solve,
// and score against truth on the configured evaluation scope. Deterministic
// given spec.seed.
std::vector<RunRecord> run_experiment(const SparseWeightedGraph& g, const std::vector<int>& truth,
                                      const ExperimentSpec& spec,
                                      const std::optional<Matrix>& fixed_priors = std::nullopt);

struct SummaryRow {
  Method method;
  int setting;
  SelectionScheme scheme;
  double subset_pct;
  int count = 0;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;  // population convention
  double mean_initial_accuracy = 0.0;
};

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records);

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
// Gnuplot-style panel data: one block per (method, setting, scheme), columns
// subset_pct, mean, sd, mean_initial.
void write_curves_dat(const std::string& path, const std::vector<SummaryRow>& rows);

// Flat key-value experiment file: `key = value` lines, `#` comments,
// comma-separated list values.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

// Per-method C grids (and the WvRN-V2 nu map nu = 1/(1+C)).
std::vector<double> default_c_grid(Method m);
bool method_uses_cv(Method m, int setting);
bool method_valid_in_setting(Method m, int setting);

}  // namespace gbc
