#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gbc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Argmax over row i with lowest-index tie-break.
int argmax_row(const Matrix& m, int i);

// Argmax label per row.
std::vector<int> derived_labels(const Matrix& p);

// Every entry in [0,1] and every row sums to 1 within tol.
bool is_row_stochastic(const Matrix& m, double tol = 1e-9);

// Counter-based PRNG: a 64-bit seed is mixed with a stream index through
// splitmix64 to seed one independent substream per node/trial, so draws do
// not depend on evaluation order.
std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL)) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : Rng(splitmix64(seed) ^ splitmix64(stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL)) {}

  std::uint64_t next_u64() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a,b].
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform integer in [0,n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace gbc
