#pragma once

#include "gbc/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace gbc {

struct EdgeTriple {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

enum class LaplacianKind { Unnormalized, Normalized };

// Immutable sparse symmetric weighted graph in CSR form with per-node
// degrees d_ii = sum_j w_ij. All operators are applied matrix-free.
//
// Construction sums duplicate directed entries and symmetrizes, so feeding
// both (u,v,w) and (v,u,w) yields a single undirected edge of weight 2w.
// Self-loops are dropped (counted in dropped_self_loops()).
//
// Isolated nodes: rows of D^-1 and D^-1/2 are defined as zero, so the
// normalized operators leave those rows at zero.
class SparseWeightedGraph {
 public:
  static SparseWeightedGraph FromTriples(int n, std::span<const EdgeTriple> triples);
  static SparseWeightedGraph FromTriples(int n, const std::vector<EdgeTriple>& triples) {
    return FromTriples(n, std::span<const EdgeTriple>(triples));
  }

  int num_nodes() const { return n_; }
  int num_undirected_edges() const { return static_cast<int>(edges_.size()); }
  int dropped_self_loops() const { return dropped_self_loops_; }

  double degree(int i) const { return degrees_[i]; }
  const Vector& degrees() const { return degrees_vec_; }
  bool isolated(int i) const { return degrees_[i] == 0.0; }

  // CSR row i: neighbor/weight pairs.
  std::span<const int> neighbors(int i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> weights(int i) const {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  // Per CSR slot, the index of the corresponding undirected edge.
  std::span<const int> edge_ids(int i) const {
    return {edge_id_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  // Undirected edge list (u < v) with weights, in lexicographic order.
  // Region-based methods index their per-edge distributions by position here.
  const std::vector<std::pair<int, int>>& undirected_edges() const { return edges_; }
  const std::vector<double>& undirected_weights() const { return edge_weights_; }

  Matrix apply_adjacency(const Matrix& m) const;             // W M
  Matrix apply_row_normalized(const Matrix& m) const;        // D^-1 W M
  Matrix apply_symmetric_normalized(const Matrix& m) const;  // D^-1/2 W D^-1/2 M
  Matrix apply_laplacian(LaplacianKind kind, const Matrix& m) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
  std::vector<int> edge_id_;
  std::vector<double> degrees_;
  Vector degrees_vec_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> edge_weights_;
  int dropped_self_loops_ = 0;
};

}  // namespace gbc
