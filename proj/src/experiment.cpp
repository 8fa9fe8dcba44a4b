#include "gbc/experiment.hpp"

#include "gbc/io.hpp"
#include "gbc/quadratic.hpp"
#include "gbc/region.hpp"
#include "gbc/wvrn.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <tuple>
#include <stdexcept>

namespace gbc {

std::string method_name(Method m) {
  switch (m) {
    case Method::GFHF: return "GFHF";
    case Method::LGC: return "LGC";
    case Method::WvRN: return "WvRN";
    case Method::WvRNV1: return "WvRN-V1";
    case Method::WvRNV2: return "WvRN-V2";
    case Method::IR: return "IR";
    case Method::DIR: return "DIR";
    case Method::LSR: return "LSR";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::GFHF, Method::LGC, Method::WvRN, Method::WvRNV1, Method::WvRNV2,
                   Method::IR, Method::DIR, Method::LSR}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + name);
}

BlockGraph generate_block_graph(const SyntheticBlockSpec& spec) {
  if (spec.blocks.size() < 2) throw std::invalid_argument("need at least two blocks");
  for (double p : {spec.p_within, spec.p_across}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("edge probability outside [0,1]");
  }
  BlockGraph out;
  int n = 0;
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    if (spec.blocks[b] <= 0) throw std::invalid_argument("block sizes must be positive");
    for (int i = 0; i < spec.blocks[b]; ++i) out.truth.push_back(static_cast<int>(b));
    n += spec.blocks[b];
  }
  std::vector<EdgeTriple> triples;
  Rng rng(spec.seed, 0x626c6f636bULL);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      double p = out.truth[static_cast<std::size_t>(u)] == out.truth[static_cast<std::size_t>(v)]
                     ? spec.p_within
                     : spec.p_across;
      if (rng.uniform() < p) triples.push_back({u, v, spec.weight});
    }
  }
  out.graph = SparseWeightedGraph::FromTriples(n, triples);
  return out;
}

std::vector<double> default_c_grid(Method m) {
  switch (m) {
    case Method::LGC:
    case Method::WvRNV2: return make_doubling_grid(0.00153, 100.0);
    case Method::IR: return make_doubling_grid(0.0625, 312.5);
    case Method::DIR:
    case Method::LSR: return make_doubling_grid(0.078, 10.0);
    default: return {};
  }
}

bool method_uses_cv(Method m, int setting) {
  if (m == Method::LGC) return true;
  if (setting == 2 && (m == Method::WvRNV2 || m == Method::IR || m == Method::DIR || m == Method::LSR)) {
    return true;
  }
  return false;
}

bool method_valid_in_setting(Method m, int setting) {
  if (m == Method::WvRN) return setting == 1;
  if (m == Method::WvRNV1 || m == Method::WvRNV2) return setting == 2;
  return true;
}

namespace {

Vector zero_held_out(const Vector& lambda, const std::vector<int>& held_out) {
  Vector out = lambda;
  for (int i : held_out) out(i) = 0.0;
  return out;
}

RegionMethod to_region_method(Method m) {
  switch (m) {
    case Method::IR: return RegionMethod::IR;
    case Method::DIR: return RegionMethod::DIR;
    default: return RegionMethod::LSR;
  }
}

struct MethodOutcome {
  Matrix p;
  int iterations = 0;
};

// One full solve of a method at fixed parameters. `lambda` carries the
// setting-appropriate fit weights; `clamp` the setting-1 subset.
MethodOutcome solve_method(Method m, int setting, const SparseWeightedGraph& g, const Matrix& p0,
                           const Matrix& y, const Vector& lambda, const std::vector<int>& clamp,
                           double c, std::vector<double>* objective_sink) {
  MethodOutcome out;
  switch (m) {
    case Method::GFHF: {
      auto z = build_node_regularization(g, lambda, y);
      auto r = solve_gfhf(g, lambda, z.z);
      out.p = std::move(r.f);
      out.iterations = r.iterations;
      return out;
    }
    case Method::LGC: {
      auto z = build_node_regularization(g, lambda, y);
      auto r = solve_lgc(g, lambda, z.z, c);
      out.p = std::move(r.f);
      out.iterations = r.iterations;
      return out;
    }
    case Method::WvRN:
    case Method::WvRNV1:
    case Method::WvRNV2: {
      WvrnConfig cfg;
      cfg.variant = m == Method::WvRN ? WvrnVariant::Base
                                      : (m == Method::WvRNV1 ? WvrnVariant::V1 : WvrnVariant::V2);
      if (m == Method::WvRNV2) cfg.nu = 1.0 / (1.0 + c);
      const Matrix& init = m == Method::WvRN ? y : p0;
      auto r = wvrn(g, init, clamp, cfg, lambda);
      out.p = std::move(r.p);
      out.iterations = r.iterations;
      return out;
    }
    case Method::IR:
    case Method::DIR:
    case Method::LSR: {
      RegionConfig cfg;
      cfg.method = to_region_method(m);
      cfg.setting = setting;
      cfg.c = c;
      cfg.lambda = setting == 2 ? lambda : Vector();
      const Matrix& init = setting == 1 ? y : p0;
      auto r = run_region_method(g, cfg, init, clamp);
      out.p = std::move(r.p);
      out.iterations = r.outer_iterations;
      if (objective_sink) *objective_sink = r.objective_trace;
      return out;
    }
  }
  throw std::logic_error("unhandled method");
}

}  // namespace

std::vector<RunRecord> run_experiment(const SparseWeightedGraph& g, const std::vector<int>& truth,
                                      const ExperimentSpec& spec,
                                      const std::optional<Matrix>& fixed_priors) {
  const int n = g.num_nodes();
  if (static_cast<int>(truth.size()) != n) throw std::invalid_argument("truth size mismatch");
  if (spec.trials < 1) throw std::invalid_argument("need at least one trial");
  const int num_classes = 1 + *std::max_element(truth.begin(), truth.end());
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  for (Method m : spec.methods) {
    if (!method_valid_in_setting(m, spec.setting)) {
      throw std::invalid_argument(method_name(m) + " is undefined in setting " +
                                  std::to_string(spec.setting));
    }
  }
  for (double pct : spec.subset_percents) {
    if (!(pct > 0.0 && pct <= 100.0)) throw std::invalid_argument("subset percent outside (0,100]");
  }

  std::ofstream cv_trace_out, obj_trace_out;
  if (spec.cv_trace) {
    cv_trace_out.open(spec.out_dir.empty() ? "cv_trace.csv" : spec.out_dir + "/cv_trace.csv");
    cv_trace_out << "method,setting,scheme,subset_pct,trial,C,fold,accuracy\n";
  }
  if (spec.objective_trace) {
    obj_trace_out.open(spec.out_dir.empty() ? "objective_trace.csv"
                                            : spec.out_dir + "/objective_trace.csv");
    obj_trace_out << "method,setting,scheme,subset_pct,trial,iter,objective,delta\n";
  }

  std::vector<RunRecord> records;
  for (int trial = 0; trial < spec.trials; ++trial) {
    const std::uint64_t trial_seed = splitmix64(spec.seed ^ (0x747269616cULL + static_cast<std::uint64_t>(trial)));
    Matrix p0 = fixed_priors ? *fixed_priors
                             : generate_noisy_priors(truth, num_classes,
                                                     {spec.p_min, spec.p_max, trial_seed});
    Vector scores = scheme_scores(p0, spec.scheme);
    std::vector<int> noisy_labels = derived_labels(p0);

    for (double pct : spec.subset_percents) {
      // Setting 1 clamps the selected subset; setting 2 uses it only as the
      // CV evaluation pool.
      SelectionResult sel = select_subset(scores, SelectionCriterion::TopPercent(pct), p0,
                                          /*ensure_coverage=*/spec.setting == 1);
      Vector lambda = spec.setting == 1 ? lambda_setting1(n, sel.selected)
                                        : lambda_setting2(p0, spec.scheme);
      std::vector<int> clamp = spec.setting == 1 ? sel.selected : std::vector<int>();

      // Setting 1: labels are the hard derived labels; unclamped rows of the
      // probabilistic init start uniform (their priors are treated as unknown).
      Matrix y;
      if (spec.setting == 1) {
        y = Matrix::Constant(n, num_classes, 1.0 / num_classes);
        for (int i : sel.selected) {
          y.row(i).setZero();
          y(i, noisy_labels[static_cast<std::size_t>(i)]) = 1.0;
        }
      } else {
        y = p0;
      }

      std::vector<int> eval_set;
      if (spec.eval_scope == EvalScope::AllNodes) {
        eval_set.resize(static_cast<std::size_t>(n));
        std::iota(eval_set.begin(), eval_set.end(), 0);
      } else {
        eval_set = sel.selected;
      }
      const double initial_acc = accuracy(p0, truth, eval_set);

      for (Method m : spec.methods) {
        int method_trials = (m == Method::IR && spec.ir_trials >= 0) ? spec.ir_trials : spec.trials;
        if (trial >= method_trials) continue;

        auto t0 = std::chrono::steady_clock::now();
        double chosen_c = 1.0;
        if (method_uses_cv(m, spec.setting)) {
          CVPlan plan;
          plan.folds = spec.cv_folds;
          plan.c_grid = default_c_grid(m);
          plan.rule = spec.cv_rule;
          plan.eval_nodes = sel.selected;
          plan.seed = splitmix64(trial_seed ^ 0x63766b65ULL);
          CVRunner runner = [&](double c, const std::vector<int>& held_out) {
            Vector fold_lambda = zero_held_out(lambda, held_out);
            std::vector<int> fold_clamp;
            if (spec.setting == 1) {
              std::vector<char> held(static_cast<std::size_t>(n), 0);
              for (int i : held_out) held[static_cast<std::size_t>(i)] = 1;
              for (int i : clamp) {
                if (!held[static_cast<std::size_t>(i)]) fold_clamp.push_back(i);
              }
            }
            std::vector<int> pred(held_out.size());
            try {
              MethodOutcome o =
                  solve_method(m, spec.setting, g, p0, y, fold_lambda, fold_clamp, c, nullptr);
              for (std::size_t j = 0; j < held_out.size(); ++j) {
                pred[j] = argmax_row(o.p, held_out[j]);
              }
            } catch (const std::exception&) {
              // Degenerate fold (a class lost all label support): fall back
              // to the priors' own labels so the fold still scores.
              for (std::size_t j = 0; j < held_out.size(); ++j) {
                pred[j] = noisy_labels[static_cast<std::size_t>(held_out[j])];
              }
            }
            return pred;
          };
          CVResult cv = cv_select(runner, plan, noisy_labels);
          chosen_c = cv.chosen_c;
          if (cv_trace_out.is_open()) {
            for (std::size_t ci = 0; ci < plan.c_grid.size(); ++ci) {
              for (std::size_t f = 0; f < cv.fold_accuracies[ci].size(); ++f) {
                cv_trace_out << method_name(m) << ',' << spec.setting << ','
                             << (spec.scheme == SelectionScheme::MPS ? "MPS" : "EBS") << ','
                             << format_double(pct) << ',' << trial << ','
                             << format_double(plan.c_grid[ci]) << ',' << f << ','
                             << format_double(cv.fold_accuracies[ci][f]) << '\n';
              }
              cv_trace_out << method_name(m) << ',' << spec.setting << ','
                           << (spec.scheme == SelectionScheme::MPS ? "MPS" : "EBS") << ','
                           << format_double(pct) << ',' << trial << ','
                           << format_double(plan.c_grid[ci]) << ",mean,"
                           << format_double(cv.mean_accuracies[ci]) << '\n';
            }
          }
        }

        std::vector<double> objective_trace;
        MethodOutcome o = solve_method(m, spec.setting, g, p0, y, lambda, clamp, chosen_c,
                                       spec.objective_trace ? &objective_trace : nullptr);
        auto t1 = std::chrono::steady_clock::now();

        if (obj_trace_out.is_open() && !objective_trace.empty()) {
          double prev = objective_trace.front();
          for (std::size_t it = 0; it < objective_trace.size(); ++it) {
            obj_trace_out << method_name(m) << ',' << spec.setting << ','
                          << (spec.scheme == SelectionScheme::MPS ? "MPS" : "EBS") << ','
                          << format_double(pct) << ',' << trial << ',' << it << ','
                          << format_double(objective_trace[it]) << ','
                          << format_double(objective_trace[it] - prev) << '\n';
            prev = objective_trace[it];
          }
        }
        if (spec.dump_scores && !spec.out_dir.empty()) {
          save_priors_csv(spec.out_dir + "/scores_" + method_name(m) + "_s" +
                              std::to_string(spec.setting) + "_p" + format_double(pct) + "_t" +
                              std::to_string(trial) + ".csv",
                          o.p);
        }

        RunRecord rec;
        rec.method = m;
        rec.setting = spec.setting;
        rec.scheme = spec.scheme;
        rec.subset_pct = pct;
        rec.c_chosen = chosen_c;
        rec.trial_seed = trial_seed;
        rec.accuracy = accuracy(o.p, truth, eval_set);
        rec.initial_accuracy = initial_acc;
        rec.iterations = o.iterations;
        rec.wall_time_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
        records.push_back(rec);
      }
    }
  }
  return records;
}

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) return {};
  std::map<std::tuple<int, int, int, double>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    groups[{static_cast<int>(r.method), r.setting, static_cast<int>(r.scheme), r.subset_pct}]
        .push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.method = static_cast<Method>(std::get<0>(key));
    row.setting = std::get<1>(key);
    row.scheme = static_cast<SelectionScheme>(std::get<2>(key));
    row.subset_pct = std::get<3>(key);
    row.count = static_cast<int>(members.size());
    for (const auto* r : members) {
      row.mean_accuracy += r->accuracy;
      row.mean_initial_accuracy += r->initial_accuracy;
    }
    row.mean_accuracy /= row.count;
    row.mean_initial_accuracy /= row.count;
    double var = 0.0;
    for (const auto* r : members) {
      var += (r->accuracy - row.mean_accuracy) * (r->accuracy - row.mean_accuracy);
    }
    row.sd_accuracy = std::sqrt(var / row.count);
    rows.push_back(row);
  }
  return rows;
}

namespace {
const char* scheme_str(SelectionScheme s) { return s == SelectionScheme::MPS ? "MPS" : "EBS"; }
}  // namespace

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  // Wall time is deliberately left out: identical specs must produce
  // byte-identical files.
  out << "method,setting,scheme,subset_pct,C_chosen,trial_seed,accuracy,initial_accuracy,iterations\n";
  for (const auto& r : records) {
    out << method_name(r.method) << ',' << r.setting << ',' << scheme_str(r.scheme) << ','
        << format_double(r.subset_pct) << ',' << format_double(r.c_chosen) << ',' << r.trial_seed
        << ',' << format_double(r.accuracy) << ',' << format_double(r.initial_accuracy) << ','
        << r.iterations << '\n';
  }
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "method,setting,scheme,subset_pct,count,mean_accuracy,sd_accuracy,mean_initial_accuracy\n";
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << r.setting << ',' << scheme_str(r.scheme) << ','
        << format_double(r.subset_pct) << ',' << r.count << ',' << format_double(r.mean_accuracy)
        << ',' << format_double(r.sd_accuracy) << ',' << format_double(r.mean_initial_accuracy)
        << '\n';
  }
}

void write_curves_dat(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string current;
  for (const auto& r : rows) {
    std::string panel = method_name(r.method) + " setting=" + std::to_string(r.setting) + " " +
                        scheme_str(r.scheme);
    if (panel != current) {
      if (!current.empty()) out << "\n\n";
      out << "# " << panel << "\n# subset_pct mean sd initial\n";
      current = panel;
    }
    out << format_double(r.subset_pct) << ' ' << format_double(r.mean_accuracy) << ' '
        << format_double(r.sd_accuracy) << ' ' << format_double(r.mean_initial_accuracy) << '\n';
  }
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

}  // namespace gbc
