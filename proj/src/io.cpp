#include "gbc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gbc {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(field);
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

GraphLoadReport load_edge_list(const std::string& path, std::optional<int> nodes) {
  auto in = open_input(path);
  std::vector<EdgeTriple> triples;
  int max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    EdgeTriple t;
    std::istringstream ss(line);
    if (!(ss >> t.u >> t.v >> t.w)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed edge line");
    }
    max_id = std::max({max_id, t.u, t.v});
    triples.push_back(t);
  }
  int n = nodes.value_or(max_id + 1);
  auto g = SparseWeightedGraph::FromTriples(n, triples);
  return {std::move(g), g.dropped_self_loops()};
}

void save_edge_list(const std::string& path, const SparseWeightedGraph& g) {
  auto out = open_output(path);
  out << "# u\tv\tw\n";
  const auto& edges = g.undirected_edges();
  const auto& weights = g.undirected_weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out << edges[e].first << '\t' << edges[e].second << '\t' << format_double(weights[e]) << '\n';
  }
}

Matrix load_priors_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty priors file");
  auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "node") {
    throw std::runtime_error(path + ": expected header node,p_0,...,p_{K-1}");
  }
  const int num_classes = static_cast<int>(header.size()) - 1;

  std::vector<std::pair<int, std::vector<double>>> rows;
  int max_node = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != num_classes + 1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    int node = std::stoi(fields[0]);
    std::vector<double> p(static_cast<std::size_t>(num_classes));
    double sum = 0.0;
    for (int k = 0; k < num_classes; ++k) {
      p[static_cast<std::size_t>(k)] = std::stod(fields[static_cast<std::size_t>(k) + 1]);
      if (p[static_cast<std::size_t>(k)] < -1e-6 || p[static_cast<std::size_t>(k)] > 1.0 + 1e-6) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": entry outside [0,1]");
      }
      sum += p[static_cast<std::size_t>(k)];
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": row does not sum to 1");
    }
    for (auto& v : p) v = std::max(v, 0.0) / sum;
    max_node = std::max(max_node, node);
    rows.emplace_back(node, std::move(p));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no prior rows");

  Matrix p = Matrix::Zero(max_node + 1, num_classes);
  std::vector<char> seen(static_cast<std::size_t>(max_node) + 1, 0);
  for (const auto& [node, row] : rows) {
    if (node < 0) throw std::runtime_error(path + ": negative node id");
    seen[static_cast<std::size_t>(node)] = 1;
    for (int k = 0; k < num_classes; ++k) p(node, k) = row[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i <= max_node; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) throw std::runtime_error(path + ": missing row for node " + std::to_string(i));
  }
  return p;
}

void save_priors_csv(const std::string& path, const Matrix& p) {
  auto out = open_output(path);
  out << "node";
  for (int k = 0; k < p.cols(); ++k) out << ",p_" << k;
  out << '\n';
  for (int i = 0; i < p.rows(); ++i) {
    out << i;
    for (int k = 0; k < p.cols(); ++k) out << ',' << format_double(p(i, k));
    out << '\n';
  }
}

std::vector<int> load_truth_labels(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<int, int>> rows;
  int max_node = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int node = 0, label = 0;
    if (!(ss >> node >> label)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed label line");
    }
    if (node < 0 || label < 0) throw std::runtime_error(path + ": negative node or class id");
    max_node = std::max(max_node, node);
    rows.emplace_back(node, label);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no label rows");
  std::vector<int> labels(static_cast<std::size_t>(max_node) + 1, -1);
  for (auto [node, label] : rows) labels[static_cast<std::size_t>(node)] = label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw std::runtime_error(path + ": missing label for node " + std::to_string(i));
  }
  return labels;
}

void save_truth_labels(const std::string& path, const std::vector<int>& labels) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels[i] << '\n';
}

}  // namespace gbc
