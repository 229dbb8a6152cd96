#pragma once

#include <cstdint>
#include <random>

#include "crc/synthetic.hpp"
#include "crc/tensor.hpp"
#include "crc/types.hpp"

namespace crc::testing {

inline Tensor3 random_tensor(std::size_t d0, std::size_t d1, std::size_t d2, std::uint64_t seed,
                             double stddev = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, stddev);
  Tensor3 t(d0, d1, d2);
  for (double& v : t.values()) v = n(rng);
  return t;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double stddev = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline double max_abs(const Tensor3& t) {
  double m = 0.0;
  for (double v : t.values()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

/// Chain 0 -> 1 -> ... -> N-1 with one-lag linear couplings and AR(1) self terms.
inline SyntheticSpec chain_spec(std::size_t nodes, double sigma, std::uint64_t seed, std::size_t length = 600) {
  SyntheticSpec s;
  s.nodes = nodes;
  s.self_ar.assign(nodes, {0.5});
  s.cross.assign(nodes, {});
  for (std::size_t i = 1; i < nodes; ++i) s.cross[i].push_back(CrossTerm{i - 1, {0.4}, 0.0});
  s.forcing_amplitude.assign(nodes, 1.0);
  s.forcing_phase.assign(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) s.forcing_phase[i] = 0.7 * static_cast<double>(i);
  s.sigma = sigma;
  s.length = length;
  s.seed = seed;
  return s;
}

inline Shape small_shape(std::size_t nodes, std::size_t lookback = 16, std::size_t horizon = 4) {
  Shape sh;
  sh.nodes = nodes;
  sh.lookback = lookback;
  sh.horizon = horizon;
  return sh;
}

}  // namespace crc::testing
