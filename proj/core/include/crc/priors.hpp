#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "crc/graph.hpp"
#include "crc/tensor.hpp"

namespace crc {

/// Per-window statistics exposed to the corrector, in this order.
enum class Prior : std::size_t {
  mean,
  std,
  min,
  max,
  last,
  diff_mean,
  diff_std,
  lag1_autocorr,
  last_quarter_ratio,
  dominant_power_fraction,
};

inline constexpr std::size_t kPriorCount = 10;
using PriorVector = std::array<double, kPriorCount>;

/// Statistics of one length-P window. Degenerate cases are defined rather
/// than NaN: zero-variance windows have lag-1 autocorrelation 0 and dominant
/// power fraction 0; the last-quarter ratio is 1 when |mean| < 1e-8 and is
/// clamped to [-10, 10].
class WindowStatistics {
 public:
  explicit WindowStatistics(std::size_t lookback);
  PriorVector operator()(std::span<const double> window) const;
  /// max_k |X_k|^2 / sum_k |X_k|^2 over bins k = 1..P/2 of the mean-removed window.
  double dominant_power_fraction(std::span<const double> window) const;

 private:
  std::size_t lookback_;
  std::vector<double> cos_, sin_;
};

struct FeaturePriors {
  Tensor3 own;         // [B x N x q]
  Tensor3 aggregated;  // [B x N x q], A_norm * own
};

FeaturePriors compute_priors(const Tensor3& history, const AdjacencyGraph& graph);

}  // namespace crc
