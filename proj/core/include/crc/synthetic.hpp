#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crc/kvfile.hpp"
#include "crc/tensor.hpp"
#include "crc/types.hpp"

namespace crc {

/// Systematic influence of `source` on a target node:
///   sum_l lags[l-1] * x_source[t-l]  +  quadratic * x_source[t-1]^2
struct CrossTerm {
  std::size_t source = 0;
  std::vector<double> lags;
  double quadratic = 0.0;
};

enum class NoiseKind { gaussian, student_t };

/// Multivariate data-generating process
///   x_i[t] = f_i(x_i history, t) + sum_{j in Pa(i)} g_{j->i}(x_j history) + noise_i[t]
/// where f_i is a linear AR recursion plus a known sinusoidal forcing term.
/// A forecaster that knows f_i but not the cross terms leaves exactly the
/// cross-node term (plus noise) in its residual.
struct SyntheticSpec {
  std::size_t nodes = 0;
  std::vector<std::vector<double>> self_ar;     // per node, lag 1..L
  std::vector<std::vector<CrossTerm>> cross;    // per target node
  std::vector<double> forcing_amplitude;        // per node (0 = none)
  std::vector<double> forcing_phase;            // per node, radians
  double forcing_period = 24.0;
  NoiseKind noise = NoiseKind::gaussian;
  double sigma = 0.1;   // gaussian std
  double nu = 3.0;      // student-t degrees of freedom
  double scale = 0.1;   // student-t scale
  std::size_t length = 1000;
  std::size_t burn_in = 200;
  std::uint64_t seed = 1;

  std::vector<std::size_t> parents(std::size_t node) const;
  std::size_t max_lag() const;
  double forcing(std::size_t node, double time) const;

  /// Throws ConfigError on malformed structure (self loops, bad indices).
  void validate_structure() const;
  /// Spectral radius of the companion matrix of the linear part.
  double spectral_radius() const;

  KvFile to_kv() const;
  static SyntheticSpec from_kv(const KvFile& kv);
};

/// Options for drawing a random stable spec.
struct RandomSpecOptions {
  std::size_t nodes = 8;
  std::size_t ar_order = 2;
  std::size_t cross_lags = 2;
  std::size_t max_parents = 2;
  double cross_strength = 0.3;
  double quadratic = 0.0;
  double forcing_amplitude = 1.0;
  double forcing_period = 24.0;
  NoiseKind noise = NoiseKind::gaussian;
  double sigma = 0.1;
  double nu = 3.0;
  double scale = 0.1;
  std::size_t length = 1000;
  std::uint64_t seed = 1;
};

/// Rejection-samples coefficients until the linear system is stable.
SyntheticSpec random_spec(const RandomSpecOptions& options);

struct SyntheticSplitOracle {
  Tensor3 cross_term;  // noise-free full rollout minus f-only rollout
  Tensor3 noise_part;  // target minus noise-free full rollout
  std::vector<std::size_t> start_time;  // absolute time of each window's first history row
};

struct SyntheticDataset {
  DatasetSplit split;  // base forecasts are the oracle baseline
  SyntheticSplitOracle train, val, test;
};

/// Simulates the recursion (burn-in discarded). Throws UnstableSystem when
/// the linear part is not stable or the realized path diverges.
Matrix simulate_series(const SyntheticSpec& spec);

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, const Shape& shape,
                                    const SplitFractions& fractions = {});

/// Multi-step rollout of the f-only dynamics (no cross terms, no noise)
/// from each history window; predictions feed back into later steps.
Tensor3 oracle_baseline(const SyntheticSpec& spec, const Tensor3& history,
                        const std::vector<std::size_t>& start_time, std::size_t horizon);

/// Noise-free rollout of the full dynamics (f and all cross terms).
Tensor3 full_rollout(const SyntheticSpec& spec, const Tensor3& history,
                     const std::vector<std::size_t>& start_time, std::size_t horizon);

}  // namespace crc
