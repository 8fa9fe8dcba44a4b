#include "gbc/graph.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace gbc {

SparseWeightedGraph SparseWeightedGraph::FromTriples(int n, std::span<const EdgeTriple> triples) {
  if (n < 0) throw std::invalid_argument("node count must be nonnegative");

  // Accumulate undirected weights keyed by (min,max); map keeps edges sorted.
  std::map<std::pair<int, int>, double> acc;
  int self_loops = 0;
  for (const auto& t : triples) {
    if (t.u < 0 || t.u >= n || t.v < 0 || t.v >= n) {
      throw std::out_of_range("edge endpoint " + std::to_string(t.u) + "," +
                              std::to_string(t.v) + " out of range for n=" + std::to_string(n));
    }
    if (t.w < 0.0) throw std::invalid_argument("negative edge weight");
    if (t.u == t.v) {
      ++self_loops;
      continue;
    }
    auto key = std::minmax(t.u, t.v);
    acc[{key.first, key.second}] += t.w;
  }

  SparseWeightedGraph g;
  g.n_ = n;
  g.dropped_self_loops_ = self_loops;
  g.edges_.reserve(acc.size());
  g.edge_weights_.reserve(acc.size());

  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (const auto& [e, w] : acc) {
    g.edges_.push_back(e);
    g.edge_weights_.push_back(w);
    ++counts[static_cast<std::size_t>(e.first)];
    ++counts[static_cast<std::size_t>(e.second)];
  }

  g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) g.row_ptr_[static_cast<std::size_t>(i) + 1] = g.row_ptr_[static_cast<std::size_t>(i)] + counts[static_cast<std::size_t>(i)];
  g.col_idx_.resize(static_cast<std::size_t>(g.row_ptr_[static_cast<std::size_t>(n)]));
  g.values_.resize(g.col_idx_.size());
  g.edge_id_.resize(g.col_idx_.size());

  std::vector<int> cursor(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    auto [u, v] = g.edges_[e];
    double w = g.edge_weights_[e];
    int su = cursor[static_cast<std::size_t>(u)]++;
    g.col_idx_[static_cast<std::size_t>(su)] = v;
    g.values_[static_cast<std::size_t>(su)] = w;
    g.edge_id_[static_cast<std::size_t>(su)] = static_cast<int>(e);
    int sv = cursor[static_cast<std::size_t>(v)]++;
    g.col_idx_[static_cast<std::size_t>(sv)] = u;
    g.values_[static_cast<std::size_t>(sv)] = w;
    g.edge_id_[static_cast<std::size_t>(sv)] = static_cast<int>(e);
  }

  g.degrees_.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (double w : g.weights(i)) d += w;
    g.degrees_[static_cast<std::size_t>(i)] = d;
  }
  g.degrees_vec_ = Eigen::Map<const Vector>(g.degrees_.data(), n);
  return g;
}

namespace {
void check_rows(const SparseWeightedGraph& g, const Matrix& m) {
  if (m.rows() != g.num_nodes()) throw std::invalid_argument("matrix row count does not match node count");
}
}  // namespace

Matrix SparseWeightedGraph::apply_adjacency(const Matrix& m) const {
  check_rows(*this, m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < n_; ++i) {
    auto nbr = neighbors(i);
    auto wts = weights(i);
    for (std::size_t e = 0; e < nbr.size(); ++e) out.row(i) += wts[e] * m.row(nbr[e]);
  }
  return out;
}

Matrix SparseWeightedGraph::apply_row_normalized(const Matrix& m) const {
  check_rows(*this, m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < n_; ++i) {
    double d = degrees_[static_cast<std::size_t>(i)];
    if (d == 0.0) continue;  // isolated: zero row
    auto nbr = neighbors(i);
    auto wts = weights(i);
    for (std::size_t e = 0; e < nbr.size(); ++e) out.row(i) += (wts[e] / d) * m.row(nbr[e]);
  }
  return out;
}

Matrix SparseWeightedGraph::apply_symmetric_normalized(const Matrix& m) const {
  check_rows(*this, m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < n_; ++i) {
    double di = degrees_[static_cast<std::size_t>(i)];
    if (di == 0.0) continue;
    auto nbr = neighbors(i);
    auto wts = weights(i);
    for (std::size_t e = 0; e < nbr.size(); ++e) {
      int j = nbr[e];
      double dj = degrees_[static_cast<std::size_t>(j)];
      out.row(i) += (wts[e] / std::sqrt(di * dj)) * m.row(j);
    }
  }
  return out;
}

Matrix SparseWeightedGraph::apply_laplacian(LaplacianKind kind, const Matrix& m) const {
  check_rows(*this, m);
  if (kind == LaplacianKind::Unnormalized) {
    Matrix out = apply_adjacency(m);
    for (int i = 0; i < n_; ++i) out.row(i) = degrees_[static_cast<std::size_t>(i)] * m.row(i) - out.row(i);
    return out;
  }
  return m - apply_symmetric_normalized(m);
}

}  // namespace gbc
