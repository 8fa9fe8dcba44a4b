#pragma once

#include "gbc/graph.hpp"
#include "gbc/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gbc {

struct GraphLoadReport {
  SparseWeightedGraph graph;
  int dropped_self_loops = 0;
};

// Edge-list file: one `u<TAB>v<TAB>w` per line, 0-based ids, `#` comments.
// Node count is 1 + max id unless overridden.
GraphLoadReport load_edge_list(const std::string& path, std::optional<int> nodes = std::nullopt);
void save_edge_list(const std::string& path, const SparseWeightedGraph& g);

// Priors CSV with header `node,p_0,...,p_{K-1}`. Rows are validated against
// the simplex within 1e-6 then renormalized exactly.
Matrix load_priors_csv(const std::string& path);
void save_priors_csv(const std::string& path, const Matrix& p);

// Truth labels: `node<TAB>class`, 0-based class ids, one line per node.
std::vector<int> load_truth_labels(const std::string& path);
void save_truth_labels(const std::string& path, const std::vector<int>& labels);

// Fixed float formatting shared by every writer so identical runs produce
// byte-identical files.
std::string format_double(double v);

}  // namespace gbc
