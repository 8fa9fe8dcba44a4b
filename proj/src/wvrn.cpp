#include "gbc/wvrn.hpp"

#include <stdexcept>

namespace gbc {

WvrnResult wvrn(const SparseWeightedGraph& g, const Matrix& p0,
                const std::vector<int>& clamp_set, const WvrnConfig& cfg,
                const Vector& lambda,
                const std::function<void(int, const Matrix&)>& observer) {
  const int n = g.num_nodes();
  const int num_classes = static_cast<int>(p0.cols());
  if (p0.rows() != n) throw std::invalid_argument("priors row count mismatch");
  if (!(cfg.nu > 0.0 && cfg.nu < 1.0)) throw std::invalid_argument("nu must lie in (0,1)");
  if (cfg.variant == WvrnVariant::V2 && lambda.size() != n) {
    throw std::invalid_argument("V2 requires per-node lambda");
  }
  if (cfg.variant != WvrnVariant::Base && !clamp_set.empty()) {
    throw std::invalid_argument("setting-2 variants clamp nothing");
  }

  std::vector<char> clamped(static_cast<std::size_t>(n), 0);
  for (int i : clamp_set) clamped[static_cast<std::size_t>(i)] = 1;

  WvrnResult result;
  if (cfg.variant == WvrnVariant::Base) {
    if (clamp_set.empty()) throw std::invalid_argument("base variant needs a clamp set");
    // Class prior from the derived labels of the clamped subset.
    Vector prior = Vector::Zero(num_classes);
    for (int i : clamp_set) prior(argmax_row(p0, i)) += 1.0;
    prior /= prior.sum();
    result.p = Matrix::Zero(n, num_classes);
    for (int i = 0; i < n; ++i) {
      if (clamped[static_cast<std::size_t>(i)]) result.p.row(i) = p0.row(i);
      else result.p.row(i) = prior.transpose();
    }
    for (int i = 0; i < n; ++i) {
      if (!clamped[static_cast<std::size_t>(i)] && g.isolated(i)) result.unanchored.push_back(i);
    }
  } else {
    result.p = p0;
    for (int i = 0; i < n; ++i) {
      bool has_dongle = cfg.variant == WvrnVariant::V2 && lambda(i) > 0.0;
      if (g.isolated(i) && !has_dongle) result.unanchored.push_back(i);
    }
  }

  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (int i : result.unanchored) skip[static_cast<std::size_t>(i)] = 1;

  double beta = 1.0;
  for (int t = 0; t < cfg.max_iter; ++t) {
    Matrix vote = g.apply_row_normalized(result.p);
    double delta = 0.0;
    Matrix next = result.p;
    for (int i = 0; i < n; ++i) {
      if (clamped[static_cast<std::size_t>(i)] || skip[static_cast<std::size_t>(i)]) continue;
      // An isolated node reaching this point has a dongle (V2, lambda > 0);
      // with no neighbors its relational vote degenerates to its own row.
      Eigen::RowVectorXd q = g.isolated(i) ? Eigen::RowVectorXd(result.p.row(i))
                                           : Eigen::RowVectorXd(vote.row(i));
      if (cfg.variant == WvrnVariant::V2) {
        q = lambda(i) * p0.row(i) + (1.0 - lambda(i)) * q;
      }
      next.row(i) = beta * q + (1.0 - beta) * result.p.row(i);
      delta = std::max(delta, (next.row(i) - result.p.row(i)).cwiseAbs().maxCoeff());
    }
    result.p = std::move(next);
    result.iterations = t + 1;
    beta *= cfg.nu;
    if (observer) observer(t, result.p);
    if (delta < cfg.tol || beta < cfg.beta_floor) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace gbc
