#include "gbc/region.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gbc {

namespace {

using RowVec = Eigen::RowVectorXd;

// Region distribution of edge (u,v). Endpoints are canonicalized to (min,max)
// so the arithmetic is identical no matter which endpoint asks, which keeps
// the fused node updates bitwise equal to the two-step form.
RowVec region_row(RegionMethod method, const Matrix& p, int u, int v, double epsilon) {
  int a = std::min(u, v), b = std::max(u, v);
  if (method == RegionMethod::DIR) {
    RowVec r(p.cols());
    for (int k = 0; k < p.cols(); ++k) {
      r(k) = std::sqrt(std::max(p(a, k), epsilon) * std::max(p(b, k), epsilon));
    }
    return r / r.sum();
  }
  return 0.5 * (p.row(a) + p.row(b));
}

Vector effective_lambda(const RegionConfig& cfg, int n) {
  if (cfg.setting == 1) return Vector::Zero(n);
  if (cfg.lambda.size() != n) throw std::invalid_argument("setting 2 requires per-node lambda");
  return cfg.lambda;
}

double kl(const RowVec& a, const RowVec& b, double epsilon) {
  double v = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    double ak = a(k);
    if (ak > 0.0) v += ak * std::log(ak / std::max(b(k), epsilon));
  }
  return v;
}

// Per-node objective of the IR setting-2 inner problem, regions fixed.
double ir_inner_objective(const RowVec& p, const RowVec& p0, double mu,
                          std::span<const double> wts, const std::vector<RowVec>& regions,
                          double epsilon) {
  double v = mu > 0.0 ? mu * kl(p0, p, epsilon) : 0.0;
  for (std::size_t e = 0; e < regions.size(); ++e) v += wts[e] * kl(p, regions[e], epsilon);
  return v;
}

}  // namespace

Matrix ir_region_update(const Matrix& p, const SparseWeightedGraph& g) {
  const auto& edges = g.undirected_edges();
  Matrix regions(static_cast<int>(edges.size()), p.cols());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    regions.row(static_cast<int>(e)) = region_row(RegionMethod::IR, p, edges[e].first, edges[e].second, 0.0);
  }
  return regions;
}

Matrix dir_region_update(const Matrix& p, const SparseWeightedGraph& g, double epsilon) {
  const auto& edges = g.undirected_edges();
  Matrix regions(static_cast<int>(edges.size()), p.cols());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    regions.row(static_cast<int>(e)) = region_row(RegionMethod::DIR, p, edges[e].first, edges[e].second, epsilon);
  }
  return regions;
}

Matrix node_update_shared(const SparseWeightedGraph& g, const Matrix& regions, const Matrix& p0,
                          const Vector& lambda, double c, const std::vector<int>& active,
                          const Matrix& current) {
  Matrix next = current;
  for (int i : active) {
    double mu = lambda.size() > 0 ? c * lambda(i) : 0.0;
    double denom = mu + g.degree(i);
    if (denom == 0.0) continue;  // isolated with no fit weight: retain
    RowVec acc = mu > 0.0 ? RowVec(mu * p0.row(i)) : RowVec(RowVec::Zero(current.cols()));
    auto wts = g.weights(i);
    auto ids = g.edge_ids(i);
    for (std::size_t e = 0; e < wts.size(); ++e) acc += wts[e] * regions.row(ids[e]);
    next.row(i) = acc / denom;
  }
  return next;
}

Matrix ir_node_update_setting1(const SparseWeightedGraph& g, const Matrix& regions, double epsilon,
                               const std::vector<int>& active, const Matrix& current) {
  Matrix next = current;
  for (int i : active) {
    double d = g.degree(i);
    if (d == 0.0) continue;  // isolated: retain
    RowVec logp = RowVec::Zero(current.cols());
    auto wts = g.weights(i);
    auto ids = g.edge_ids(i);
    for (std::size_t e = 0; e < wts.size(); ++e) {
      for (int k = 0; k < current.cols(); ++k) {
        logp(k) += wts[e] * std::log(std::max(regions(ids[e], k), epsilon));
      }
    }
    logp /= d;
    logp.array() -= logp.maxCoeff();
    RowVec p = logp.array().exp();
    next.row(i) = p / p.sum();
  }
  return next;
}

Matrix ir_node_update_setting2(const SparseWeightedGraph& g, const Matrix& regions, const Matrix& p0,
                               const Vector& lambda, double c, const RegionConfig& cfg,
                               const std::vector<int>& active, const Matrix& current,
                               bool* inner_converged) {
  if (inner_converged) *inner_converged = true;
  // Zero fit weight reduces the inner problem to the setting-1 closed form.
  std::vector<int> closed_form, iterative;
  for (int i : active) {
    (c * lambda(i) > 0.0 ? iterative : closed_form).push_back(i);
  }
  Matrix next = ir_node_update_setting1(g, regions, cfg.epsilon, closed_form, current);

  for (int i : iterative) {
    double mu = c * lambda(i);
    auto wts = g.weights(i);
    auto ids = g.edge_ids(i);
    std::vector<RowVec> incident;
    incident.reserve(wts.size());
    for (std::size_t e = 0; e < wts.size(); ++e) incident.push_back(regions.row(ids[e]));

    RowVec p0_row = p0.row(i);
    RowVec p = current.row(i);
    // Keep the iterate strictly inside the simplex.
    for (int k = 0; k < p.size(); ++k) p(k) = std::max(p(k), cfg.epsilon);
    p /= p.sum();

    double obj = ir_inner_objective(p, p0_row, mu, wts, incident, cfg.epsilon);
    bool done = false;
    for (int it = 0; it < cfg.max_inner_iter && !done; ++it) {
      RowVec grad(p.size());
      for (int k = 0; k < p.size(); ++k) {
        double gk = -mu * p0_row(k) / p(k);
        for (std::size_t e = 0; e < incident.size(); ++e) {
          gk += wts[e] * (std::log(p(k) / std::max(incident[e](k), cfg.epsilon)) + 1.0);
        }
        grad(k) = gk;
      }
      // Multiplicative update with backtracking so the objective never rises.
      double step = cfg.inner_step;
      for (int half = 0; half < 60; ++half) {
        RowVec x = -step * grad;
        x.array() -= x.maxCoeff();
        RowVec trial = p.array() * x.array().exp();
        trial /= trial.sum();
        for (int k = 0; k < trial.size(); ++k) trial(k) = std::max(trial(k), cfg.epsilon);
        trial /= trial.sum();
        double trial_obj = ir_inner_objective(trial, p0_row, mu, wts, incident, cfg.epsilon);
        if (trial_obj <= obj + 1e-15) {
          double delta = (trial - p).cwiseAbs().maxCoeff();
          p = trial;
          obj = trial_obj;
          if (delta < cfg.inner_tol) done = true;
          break;
        }
        step *= 0.5;
        if (half == 59) done = true;  // no descent direction left at float precision
      }
      if (it == cfg.max_inner_iter - 1 && !done && inner_converged) *inner_converged = false;
    }
    next.row(i) = p;
  }
  return next;
}

double region_objective(const SparseWeightedGraph& g, const RegionConfig& cfg, const Matrix& p,
                        const Matrix& regions, const Matrix& p0, const std::vector<int>& active) {
  Vector lambda = effective_lambda(cfg, g.num_nodes());
  double value = 0.0;
  if (cfg.setting == 2) {
    for (int i : active) {
      double mu = cfg.c * lambda(i);
      if (mu == 0.0) continue;
      RowVec pi = p.row(i), p0i = p0.row(i);
      if (cfg.method == RegionMethod::LSR) value += mu * (p0i - pi).squaredNorm();
      else value += mu * kl(p0i, pi, cfg.epsilon);
    }
  }
  const auto& edges = g.undirected_edges();
  const auto& ew = g.undirected_weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    RowVec r = regions.row(static_cast<int>(e));
    RowVec pu = p.row(edges[e].first), pv = p.row(edges[e].second);
    double w = ew[e];
    switch (cfg.method) {
      case RegionMethod::LSR:
        value += w * ((pu - r).squaredNorm() + (pv - r).squaredNorm());
        break;
      case RegionMethod::IR:
        value += w * (kl(pu, r, cfg.epsilon) + kl(pv, r, cfg.epsilon));
        break;
      case RegionMethod::DIR:
        value += w * (kl(r, pu, cfg.epsilon) + kl(r, pv, cfg.epsilon));
        break;
    }
  }
  return value;
}

RegionResult run_region_method(const SparseWeightedGraph& g, const RegionConfig& cfg,
                               const Matrix& p0, const std::vector<int>& clamp_set,
                               const std::function<void(int, const Matrix&)>& observer) {
  const int n = g.num_nodes();
  if (p0.rows() != n) throw std::invalid_argument("priors row count mismatch");
  if (cfg.c <= 0.0) throw std::invalid_argument("C must be positive");
  if (cfg.setting != 1 && cfg.setting != 2) throw std::invalid_argument("setting must be 1 or 2");
  if (cfg.setting == 2 && !clamp_set.empty()) {
    throw std::invalid_argument("setting 2 clamps nothing");
  }
  Vector lambda = effective_lambda(cfg, n);

  std::vector<char> clamped(static_cast<std::size_t>(n), 0);
  for (int i : clamp_set) clamped[static_cast<std::size_t>(i)] = 1;
  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    if (!clamped[static_cast<std::size_t>(i)]) active.push_back(i);
  }

  RegionResult result;
  result.p = p0;
  for (int i : active) {
    if (g.isolated(i) && cfg.c * lambda(i) == 0.0) result.retained_rows.push_back(i);
  }

  for (int it = 0; it < cfg.max_outer_iter; ++it) {
    Matrix regions = cfg.method == RegionMethod::DIR ? dir_region_update(result.p, g, cfg.epsilon)
                                                     : ir_region_update(result.p, g);
    result.objective_trace.push_back(region_objective(g, cfg, result.p, regions, p0, active));
    if (observer) observer(it, result.p);

    Matrix next;
    if (cfg.method == RegionMethod::IR) {
      if (cfg.setting == 1) {
        next = ir_node_update_setting1(g, regions, cfg.epsilon, active, result.p);
      } else {
        bool inner_ok = true;
        next = ir_node_update_setting2(g, regions, p0, lambda, cfg.c, cfg, active, result.p, &inner_ok);
        result.inner_converged = result.inner_converged && inner_ok;
      }
    } else {
      next = node_update_shared(g, regions, p0, lambda, cfg.c, active, result.p);
    }
    result.objective_trace.push_back(region_objective(g, cfg, next, regions, p0, active));

    double delta = (next - result.p).cwiseAbs().maxCoeff();
    result.p = std::move(next);
    result.outer_iterations = it + 1;
    if (observer) observer(it, result.p);
    if (delta < cfg.tol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace gbc
