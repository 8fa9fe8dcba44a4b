#include "gbc/types.hpp"

namespace gbc {

int argmax_row(const Matrix& m, int i) {
  int best = 0;
  for (int k = 1; k < m.cols(); ++k) {
    if (m(i, k) > m(i, best)) best = k;
  }
  return best;
}

std::vector<int> derived_labels(const Matrix& p) {
  std::vector<int> labels(static_cast<std::size_t>(p.rows()));
  for (int i = 0; i < p.rows(); ++i) labels[static_cast<std::size_t>(i)] = argmax_row(p, i);
  return labels;
}

bool is_row_stochastic(const Matrix& m, double tol) {
  for (int i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < m.cols(); ++k) {
      double v = m(i, k);
      if (v < -tol || v > 1.0 + tol) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace gbc
