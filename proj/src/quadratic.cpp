#include "gbc/quadratic.hpp"

#include <stdexcept>
#include <string>

namespace gbc {

NormalizedLabelData build_node_regularization(const SparseWeightedGraph& g, const Vector& lambda,
                                              const Matrix& y, bool use_node_regularization) {
  const int n = g.num_nodes();
  const int num_classes = static_cast<int>(y.cols());
  if (lambda.size() != n || y.rows() != n) throw std::invalid_argument("lambda/Y size mismatch");

  NormalizedLabelData out;
  if (!use_node_regularization) {
    out.v = Vector::Ones(n);
    out.z = lambda.asDiagonal() * y;
    return out;
  }

  Vector eta = Vector::Zero(num_classes);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_classes; ++k) eta(k) += g.degree(i) * lambda(i) * y(i, k);
  }
  for (int k = 0; k < num_classes; ++k) {
    bool class_present = (y.col(k).array() > 0.0).any();
    if (class_present && eta(k) == 0.0) {
      throw std::runtime_error("degenerate class " + std::to_string(k) +
                               ": no weighted label support");
    }
  }

  out.v = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_classes; ++k) {
      if (eta(k) > 0.0) out.v(i) += g.degree(i) * lambda(i) * y(i, k) / eta(k);
    }
  }
  out.z = (out.v.array() * lambda.array()).matrix().asDiagonal() * y;
  return out;
}

double quadratic_objective(const SparseWeightedGraph& g, const QuadraticConfig& cfg,
                           const Matrix& z, const Matrix& f) {
  Matrix diff = f - z;
  Matrix lf = g.apply_laplacian(cfg.laplacian_kind, f);
  double value = 0.0;
  for (int k = 0; k < f.cols(); ++k) {
    value += cfg.c * diff.col(k).dot(cfg.h.asDiagonal() * diff.col(k));
    value += f.col(k).dot(lf.col(k));
  }
  return value;
}

SolveResult solve_generic(const SparseWeightedGraph& g, const QuadraticConfig& cfg, const Matrix& z) {
  const int n = g.num_nodes();
  if (cfg.c <= 0.0) throw std::invalid_argument("C must be positive");
  if (cfg.h.size() != n || (cfg.h.array() <= 0.0).any()) {
    throw std::invalid_argument("H must be positive on every node");
  }
  if (cfg.tol <= 0.0) throw std::invalid_argument("tol must be positive");

  SolveResult result;
  result.f = z;  // fitting anchor
  for (int it = 0; it < cfg.max_iter; ++it) {
    Matrix lf = g.apply_laplacian(cfg.laplacian_kind, result.f);
    Matrix next = z - (lf.array().colwise() * (1.0 / (cfg.c * cfg.h.array()))).matrix();
    double delta = (next - result.f).cwiseAbs().maxCoeff();
    result.f = std::move(next);
    result.iterations = it + 1;
    if (result.f.cwiseAbs().maxCoeff() > kDivergenceGuard) {
      result.converged = false;
      return result;
    }
    if (delta < cfg.tol) {
      result.converged = true;
      return result;
    }
  }
  result.converged = false;
  return result;
}

Matrix dense_adjacency(const SparseWeightedGraph& g) {
  const int n = g.num_nodes();
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    auto nbr = g.neighbors(i);
    auto wts = g.weights(i);
    for (std::size_t e = 0; e < nbr.size(); ++e) w(i, nbr[e]) = wts[e];
  }
  return w;
}

Matrix dense_row_normalized(const SparseWeightedGraph& g) {
  Matrix w = dense_adjacency(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) > 0.0) w.row(i) /= g.degree(i);
    else w.row(i).setZero();
  }
  return w;
}

Matrix dense_symmetric_normalized(const SparseWeightedGraph& g) {
  const int n = g.num_nodes();
  Matrix w = dense_adjacency(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double di = g.degree(i), dj = g.degree(j);
      w(i, j) = (di > 0.0 && dj > 0.0) ? w(i, j) / std::sqrt(di * dj) : 0.0;
    }
  }
  return w;
}

Matrix dense_laplacian(const SparseWeightedGraph& g, LaplacianKind kind) {
  const int n = g.num_nodes();
  if (kind == LaplacianKind::Unnormalized) {
    return Matrix(g.degrees().asDiagonal()) - dense_adjacency(g);
  }
  return Matrix::Identity(n, n) - dense_symmetric_normalized(g);
}

Matrix closed_form_oracle(const SparseWeightedGraph& g, const QuadraticConfig& cfg, const Matrix& z) {
  Matrix l = dense_laplacian(g, cfg.laplacian_kind);
  Matrix lhs = l + cfg.c * Matrix(cfg.h.asDiagonal());
  Matrix rhs = cfg.c * (cfg.h.asDiagonal() * z);
  return lhs.fullPivLu().solve(rhs);
}

SolveResult solve_gfhf(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z,
                       double tol, int max_iter) {
  const int n = g.num_nodes();
  if (lambda.size() != n || z.rows() != n) throw std::invalid_argument("lambda/Z size mismatch");
  if ((lambda.array() < 0.0).any() || (lambda.array() > 1.0).any()) {
    throw std::invalid_argument("lambda entries must lie in [0,1]");
  }
  if ((lambda.array() == 0.0).all()) {
    throw std::invalid_argument("nothing anchors the solution: all lambda are zero");
  }

  SolveResult result;
  result.f = lambda.asDiagonal() * z;
  for (int i = 0; i < n; ++i) {
    if (lambda(i) == 1.0) result.f.row(i) = z.row(i);  // clamp, bit-equal
  }
  for (int it = 0; it < max_iter; ++it) {
    Matrix prop = g.apply_row_normalized(result.f);
    double delta = 0.0;
    Matrix next = result.f;
    for (int i = 0; i < n; ++i) {
      if (lambda(i) == 1.0) continue;
      next.row(i) = (1.0 - lambda(i)) * prop.row(i) + lambda(i) * z.row(i);
      delta = std::max(delta, (next.row(i) - result.f.row(i)).cwiseAbs().maxCoeff());
    }
    result.f = std::move(next);
    result.iterations = it + 1;
    if (delta < tol) {
      result.converged = true;
      return result;
    }
  }
  result.converged = false;
  return result;
}

SolveResult solve_lgc(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z, double c,
                      double tol, int max_iter) {
  const int n = g.num_nodes();
  if (lambda.size() != n || z.rows() != n) throw std::invalid_argument("lambda/Z size mismatch");
  if (c <= 0.0) throw std::invalid_argument("C must be positive");
  const double gamma = 1.0 / (1.0 + c);

  Matrix anchor = (1.0 - gamma) * (lambda.asDiagonal() * z);
  SolveResult result;
  result.f = lambda.asDiagonal() * z;
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = gamma * g.apply_symmetric_normalized(result.f) + anchor;
    double delta = (next - result.f).cwiseAbs().maxCoeff();
    result.f = std::move(next);
    result.iterations = it + 1;
    if (delta < tol) {
      result.converged = true;
      return result;
    }
  }
  result.converged = false;
  return result;
}

Matrix gfhf_oracle(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z) {
  const int n = g.num_nodes();
  Matrix a = Matrix::Identity(n, n) -
             Matrix((Vector::Ones(n) - lambda).asDiagonal()) * dense_row_normalized(g);
  return a.fullPivLu().solve(Matrix(lambda.asDiagonal() * z));
}

Matrix lgc_oracle(const SparseWeightedGraph& g, const Vector& lambda, const Matrix& z, double c) {
  const int n = g.num_nodes();
  const double gamma = 1.0 / (1.0 + c);
  Matrix a = Matrix::Identity(n, n) - gamma * dense_symmetric_normalized(g);
  return (1.0 - gamma) * a.fullPivLu().solve(Matrix(lambda.asDiagonal() * z));
}

}  // namespace gbc
