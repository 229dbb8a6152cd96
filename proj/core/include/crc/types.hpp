#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crc/tensor.hpp"

namespace crc {

/// Problem dimensions. `batch` is the number of windows in an instance.
struct Shape {
  std::size_t batch = 1;
  std::size_t lookback = 2;
  std::size_t horizon = 1;
  std::size_t nodes = 1;
  std::size_t latent = 8;

  /// Throws ConfigError unless all sizes are positive and lookback >= 2.
  void validate() const;
};

/// Aligned windows for one batch of samples.
struct ForecastInstance {
  Tensor3 history;        // [B x P x N]
  Tensor3 base_forecast;  // [B x H x N]
  std::optional<Tensor3> target;  // [B x H x N]

  std::size_t samples() const { return history.dim(0); }
  std::size_t lookback() const { return history.dim(1); }
  std::size_t horizon() const { return base_forecast.dim(1); }
  std::size_t nodes() const { return history.dim(2); }
  bool has_target() const { return target.has_value(); }
  const Tensor3& target_or_throw() const;
};

/// Returns `inst` unchanged when shapes agree and every value is finite.
/// Throws ShapeMismatch or NonFinite (with the offending index) otherwise.
const ForecastInstance& validate_instance(const ForecastInstance& inst);

struct ResidualSet {
  Tensor3 raw;                       // Y - base
  std::optional<Tensor3> post_ridge;  // Y - (base + ridge_delta)
};

/// Throws MissingTarget when the instance carries no target.
ResidualSet compute_residuals(const ForecastInstance& inst,
                              const Tensor3* ridge_delta = nullptr);

/// Row ranges [begin, end) of the underlying series for each split.
struct SplitBounds {
  std::size_t train_begin = 0, train_end = 0;
  std::size_t val_begin = 0, val_end = 0;
  std::size_t test_begin = 0, test_end = 0;
};

struct SplitFractions {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

/// Per-column affine normalization fitted on the training rows.
struct Normalization {
  bool enabled = false;
  std::vector<double> mean;
  std::vector<double> scale;
};

inline constexpr std::size_t kMinValidationSamples = 30;

/// Chronological train/val/test windows over one multivariate series.
/// Windows are stride-1 and lie entirely inside their segment.
struct DatasetSplit {
  ForecastInstance train;
  ForecastInstance val;
  ForecastInstance test;
  SplitBounds bounds;
  Normalization normalization;
  Matrix series;  // [T x N], post-normalization
  std::vector<std::string> node_names;

  std::size_t nodes() const { return static_cast<std::size_t>(series.cols()); }
  Matrix train_series() const;
};

/// Computes segment bounds for `rows` rows. Throws InsufficientRows when a
/// segment cannot hold one window or validation has fewer than
/// kMinValidationSamples windows.
SplitBounds make_bounds(std::size_t rows, const SplitFractions& fractions, std::size_t lookback,
                        std::size_t horizon);

/// Number of stride-1 windows in [begin, end).
std::size_t window_count(std::size_t begin, std::size_t end, std::size_t lookback,
                         std::size_t horizon);

/// Extracts stride-1 history/target windows from `series` rows [begin, end).
void extract_windows(const Matrix& series, std::size_t begin, std::size_t end,
                     std::size_t lookback, std::size_t horizon, Tensor3& history, Tensor3& target);

}  // namespace crc
