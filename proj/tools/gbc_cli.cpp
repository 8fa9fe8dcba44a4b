// Benchmark CLI for the graph-based collective classification library.
//
// Subcommands:
//   generate  synthetic planted-partition graph + truth labels
//   noise     noisy priors from truth labels
//   select    subset selection and confidence scores
//   run       full experiment sweep (records.csv, summary.csv, curves.dat)
//   report    re-aggregate an existing records.csv

#include "gbc/experiment.hpp"
#include "gbc/io.hpp"
#include "gbc/priors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

gbc::SelectionScheme parse_scheme(const std::string& s) {
  if (s == "MPS") return gbc::SelectionScheme::MPS;
  if (s == "EBS") return gbc::SelectionScheme::EBS;
  throw CLI::ValidationError("scheme must be MPS or EBS");
}

struct RunOptions {
  std::string spec_file;
  std::string graph_path;
  std::string labels_path;
  std::string priors_path;
  std::string methods = "LSR";
  int setting = 2;
  std::string scheme = "EBS";
  std::string subset_pcts = "10,20,30,40,50,60,70,80,90";
  int trials = 100;
  int ir_trials = -1;
  std::uint64_t seed = 0;
  double p_min = 0.4;
  double p_max = 0.99;
  std::string eval_scope = "all_nodes";
  std::string cv_rule = "smallest_within_pct";
  double cv_delta = 5.0;
  int cv_folds = 5;
  std::string out_dir = ".";
  int nodes = -1;
  bool cv_trace = false;
  bool trace = false;
  bool dump_scores = false;
};

// Spec-file keys mirror the long flag names; explicit flags win.
void apply_spec_file(RunOptions& opt, const CLI::App& app) {
  auto kv = gbc::parse_kv_file(opt.spec_file);
  auto take = [&](const char* key, const char* flag, auto&& assign) {
    auto it = kv.find(key);
    if (it != kv.end() && app.count(flag) == 0) assign(it->second);
  };
  take("graph", "--graph", [&](const std::string& v) { opt.graph_path = v; });
  take("labels", "--labels", [&](const std::string& v) { opt.labels_path = v; });
  take("priors", "--priors", [&](const std::string& v) { opt.priors_path = v; });
  take("methods", "--methods", [&](const std::string& v) { opt.methods = v; });
  take("setting", "--setting", [&](const std::string& v) { opt.setting = std::stoi(v); });
  take("scheme", "--scheme", [&](const std::string& v) { opt.scheme = v; });
  take("subset-pcts", "--subset-pcts", [&](const std::string& v) { opt.subset_pcts = v; });
  take("trials", "--trials", [&](const std::string& v) { opt.trials = std::stoi(v); });
  take("ir-trials", "--ir-trials", [&](const std::string& v) { opt.ir_trials = std::stoi(v); });
  take("seed", "--seed", [&](const std::string& v) { opt.seed = std::stoull(v); });
  take("pmin", "--pmin", [&](const std::string& v) { opt.p_min = std::stod(v); });
  take("pmax", "--pmax", [&](const std::string& v) { opt.p_max = std::stod(v); });
  take("eval-scope", "--eval-scope", [&](const std::string& v) { opt.eval_scope = v; });
  take("cv-rule", "--cv-rule", [&](const std::string& v) { opt.cv_rule = v; });
  take("cv-delta", "--cv-delta", [&](const std::string& v) { opt.cv_delta = std::stod(v); });
  take("cv-folds", "--cv-folds", [&](const std::string& v) { opt.cv_folds = std::stoi(v); });
  take("out-dir", "--out-dir", [&](const std::string& v) { opt.out_dir = v; });
  take("nodes", "--nodes", [&](const std::string& v) { opt.nodes = std::stoi(v); });
}

int run_command(RunOptions& opt, const CLI::App& app) {
  if (!opt.spec_file.empty()) apply_spec_file(opt, app);
  if (opt.graph_path.empty() || opt.labels_path.empty()) {
    std::cerr << "error: usage: --graph and --labels are required\n";
    return 2;
  }

  std::optional<int> nodes;
  if (opt.nodes >= 0) nodes = opt.nodes;
  auto loaded = gbc::load_edge_list(opt.graph_path, nodes);
  auto truth = gbc::load_truth_labels(opt.labels_path);
  if (static_cast<int>(truth.size()) < loaded.graph.num_nodes()) {
    std::cerr << "error: input: labels cover fewer nodes than the graph\n";
    return 2;
  }
  truth.resize(static_cast<std::size_t>(loaded.graph.num_nodes()));

  std::optional<gbc::Matrix> priors;
  if (!opt.priors_path.empty()) priors = gbc::load_priors_csv(opt.priors_path);

  gbc::ExperimentSpec spec;
  for (const auto& name : split_list(opt.methods)) spec.methods.push_back(gbc::parse_method(name));
  spec.setting = opt.setting;
  spec.scheme = parse_scheme(opt.scheme);
  spec.subset_percents.clear();
  for (const auto& p : split_list(opt.subset_pcts)) spec.subset_percents.push_back(std::stod(p));
  spec.trials = opt.trials;
  spec.ir_trials = opt.ir_trials;
  spec.seed = opt.seed;
  spec.p_min = opt.p_min;
  spec.p_max = opt.p_max;
  if (opt.eval_scope == "all_nodes") spec.eval_scope = gbc::EvalScope::AllNodes;
  else if (opt.eval_scope == "labeled_subset") spec.eval_scope = gbc::EvalScope::LabeledSubset;
  else throw CLI::ValidationError("eval-scope must be all_nodes or labeled_subset");
  if (opt.cv_rule == "best") spec.cv_rule = gbc::CVRule::Best();
  else if (opt.cv_rule == "smallest_within_pct") spec.cv_rule = gbc::CVRule::SmallestWithinPct(opt.cv_delta);
  else if (opt.cv_rule == "smallest_within_abs") spec.cv_rule = gbc::CVRule::SmallestWithinPct(opt.cv_delta, true);
  else throw CLI::ValidationError("cv-rule must be best, smallest_within_pct or smallest_within_abs");
  spec.cv_folds = opt.cv_folds;
  spec.out_dir = opt.out_dir;
  spec.cv_trace = opt.cv_trace;
  spec.objective_trace = opt.trace;
  spec.dump_scores = opt.dump_scores;

  std::filesystem::create_directories(opt.out_dir);
  auto records = gbc::run_experiment(loaded.graph, truth, spec, priors);
  auto summary = gbc::aggregate(records);
  gbc::write_records_csv(opt.out_dir + "/records.csv", records);
  gbc::write_summary_csv(opt.out_dir + "/summary.csv", summary);
  gbc::write_curves_dat(opt.out_dir + "/curves.dat", summary);
  std::cout << records.size() << " records -> " << opt.out_dir << "/records.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based collective classification benchmark"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Synthetic planted-partition graph + truth labels");
  std::string gen_blocks = "100,100";
  gbc::SyntheticBlockSpec block_spec;
  std::string gen_out = ".";
  gen->add_option("--blocks", gen_blocks, "Comma-separated block sizes");
  gen->add_option("--p-within", block_spec.p_within, "Edge probability inside a block");
  gen->add_option("--p-across", block_spec.p_across, "Edge probability across blocks");
  gen->add_option("--weight", block_spec.weight, "Edge weight");
  gen->add_option("--seed", block_spec.seed, "Generator seed");
  gen->add_option("--out-dir", gen_out, "Output directory");

  // noise
  auto* noise = app.add_subcommand("noise", "Noisy priors from truth labels");
  std::string noise_labels, noise_out = "priors.csv";
  gbc::NoiseSpec noise_spec;
  int noise_classes = -1;
  noise->add_option("--labels", noise_labels, "Truth labels file")->required();
  noise->add_option("--pmin", noise_spec.p_min, "Lower bound on the true-class probability");
  noise->add_option("--pmax", noise_spec.p_max, "Upper bound on the true-class probability");
  noise->add_option("--seed", noise_spec.seed, "Generator seed");
  noise->add_option("--classes", noise_classes, "Class count (default: 1 + max label)");
  noise->add_option("--out", noise_out, "Output priors CSV");

  // select
  auto* sel = app.add_subcommand("select", "Subset selection and confidence scores");
  std::string sel_priors, sel_scheme = "EBS", sel_out = "selection.csv";
  double sel_top = 10.0, sel_threshold = -1.0;
  bool sel_coverage = true;
  sel->add_option("--priors", sel_priors, "Priors CSV")->required();
  sel->add_option("--scheme", sel_scheme, "MPS or EBS");
  sel->add_option("--top-pct", sel_top, "Select top-M percent by score");
  sel->add_option("--threshold", sel_threshold, "Select nodes with score >= p_th (overrides --top-pct)");
  sel->add_flag("--coverage,!--no-coverage", sel_coverage, "Force at least one node per derived class");
  sel->add_option("--out", sel_out, "Output CSV (node,score,selected,derived_label)");

  // run
  auto* run = app.add_subcommand("run", "Full experiment sweep");
  RunOptions opt;
  run->add_option("--spec", opt.spec_file, "Experiment spec file (key = value; flags override)");
  run->add_option("--graph", opt.graph_path, "Edge-list file");
  run->add_option("--labels", opt.labels_path, "Truth labels file");
  run->add_option("--priors", opt.priors_path, "Fixed priors CSV (otherwise noise is generated per trial)");
  run->add_option("--methods", opt.methods, "Comma-separated methods (GFHF,LGC,WvRN,WvRN-V1,WvRN-V2,IR,DIR,LSR)");
  run->add_option("--setting", opt.setting, "Solution setting (1 or 2)");
  run->add_option("--scheme", opt.scheme, "MPS or EBS");
  run->add_option("--subset-pcts", opt.subset_pcts, "Comma-separated subset sizes in percent");
  run->add_option("--trials", opt.trials, "Trial count");
  run->add_option("--ir-trials", opt.ir_trials, "Trial count override for IR");
  run->add_option("--seed", opt.seed, "Experiment seed");
  run->add_option("--pmin", opt.p_min, "Noise p_min");
  run->add_option("--pmax", opt.p_max, "Noise p_max");
  run->add_option("--eval-scope", opt.eval_scope, "all_nodes or labeled_subset");
  run->add_option("--cv-rule", opt.cv_rule, "best, smallest_within_pct or smallest_within_abs");
  run->add_option("--cv-delta", opt.cv_delta, "Slack for the smallest-C rule, in percent");
  run->add_option("--cv-folds", opt.cv_folds, "Cross-validation fold count");
  run->add_option("--out-dir", opt.out_dir, "Output directory");
  run->add_option("--nodes", opt.nodes, "Node count override for the edge list");
  run->add_flag("--cv-trace", opt.cv_trace, "Write cv_trace.csv");
  run->add_flag("--trace", opt.trace, "Write objective_trace.csv for region methods");
  run->add_flag("--dump-scores", opt.dump_scores, "Dump raw per-method score matrices");

  // report
  auto* rep = app.add_subcommand("report", "Re-aggregate an existing records.csv");
  std::string rep_records, rep_out = ".";
  rep->add_option("--records", rep_records, "records.csv from a previous run")->required();
  rep->add_option("--out-dir", rep_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      block_spec.blocks.clear();
      for (const auto& b : split_list(gen_blocks)) block_spec.blocks.push_back(std::stoi(b));
      auto bg = gbc::generate_block_graph(block_spec);
      std::filesystem::create_directories(gen_out);
      gbc::save_edge_list(gen_out + "/graph.tsv", bg.graph);
      gbc::save_truth_labels(gen_out + "/labels.tsv", bg.truth);
      std::cout << bg.graph.num_nodes() << " nodes, " << bg.graph.num_undirected_edges()
                << " edges -> " << gen_out << "/graph.tsv\n";
      return 0;
    }
    if (noise->parsed()) {
      auto truth = gbc::load_truth_labels(noise_labels);
      int num_classes = noise_classes > 0 ? noise_classes
                                          : 1 + *std::max_element(truth.begin(), truth.end());
      auto p = gbc::generate_noisy_priors(truth, num_classes, noise_spec);
      gbc::save_priors_csv(noise_out, p);
      std::cout << p.rows() << " prior rows -> " << noise_out << "\n";
      return 0;
    }
    if (sel->parsed()) {
      auto p = gbc::load_priors_csv(sel_priors);
      auto scheme = parse_scheme(sel_scheme);
      auto scores = gbc::scheme_scores(p, scheme);
      auto criterion = sel_threshold > 0.0 ? gbc::SelectionCriterion::Threshold(sel_threshold)
                                           : gbc::SelectionCriterion::TopPercent(sel_top);
      auto result = gbc::select_subset(scores, criterion, p, sel_coverage);
      std::ofstream out(sel_out);
      if (!out) throw std::runtime_error("cannot write " + sel_out);
      out << "node,score,selected,derived_label\n";
      std::vector<char> in_s(static_cast<std::size_t>(p.rows()), 0);
      for (int i : result.selected) in_s[static_cast<std::size_t>(i)] = 1;
      auto labels = gbc::derived_labels(p);
      for (int i = 0; i < p.rows(); ++i) {
        out << i << ',' << gbc::format_double(scores(i)) << ','
            << int(in_s[static_cast<std::size_t>(i)]) << ',' << labels[static_cast<std::size_t>(i)] << '\n';
      }
      std::cout << result.selected.size() << " nodes selected -> " << sel_out << "\n";
      return 0;
    }
    if (run->parsed()) return run_command(opt, *run);
    if (rep->parsed()) {
      // records.csv is the schema write_records_csv emits.
      std::ifstream in(rep_records);
      if (!in) throw std::runtime_error("cannot open " + rep_records);
      std::string line;
      std::getline(in, line);
      std::vector<gbc::RunRecord> records;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        gbc::RunRecord r;
        std::getline(ss, field, ','); r.method = gbc::parse_method(field);
        std::getline(ss, field, ','); r.setting = std::stoi(field);
        std::getline(ss, field, ','); r.scheme = parse_scheme(field);
        std::getline(ss, field, ','); r.subset_pct = std::stod(field);
        std::getline(ss, field, ','); r.c_chosen = std::stod(field);
        std::getline(ss, field, ','); r.trial_seed = std::stoull(field);
        std::getline(ss, field, ','); r.accuracy = std::stod(field);
        std::getline(ss, field, ','); r.initial_accuracy = std::stod(field);
        std::getline(ss, field, ','); r.iterations = std::stoi(field);
        records.push_back(r);
      }
      auto summary = gbc::aggregate(records);
      std::filesystem::create_directories(rep_out);
      gbc::write_summary_csv(rep_out + "/summary.csv", summary);
      gbc::write_curves_dat(rep_out + "/curves.dat", summary);
      std::cout << summary.size() << " summary rows -> " << rep_out << "/summary.csv\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid-argument: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: out-of-range: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
