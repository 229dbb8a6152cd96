#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crc/tensor.hpp"
#include "crc/types.hpp"

namespace crc {

/// Repeats the last observed value across the horizon.
Tensor3 persistence(const Tensor3& history, std::size_t horizon);

/// Repeats the last observed season: y[h] = x[P - period + (h mod period)].
Tensor3 seasonal_persistence(const Tensor3& history, std::size_t horizon, std::size_t period);

/// Channel-independent direct multi-horizon least-squares map, one
/// [(P + 1) x H] weight matrix per node (last row is the bias).
class LinearBaseline {
 public:
  static constexpr double kJitter = 1e-8;

  void fit(const Tensor3& history, const Tensor3& target);
  Tensor3 predict(const Tensor3& history) const;

  bool fitted() const { return !weights_.empty(); }
  const std::vector<Matrix>& weights() const { return weights_; }

 private:
  std::vector<Matrix> weights_;
};

enum class BaselineKind { persistence, seasonal, linear };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::linear;
  std::size_t period = 24;  // seasonal only

  std::string name() const;
  static BaselineSpec parse(const std::string& text);
};

/// Fits on the train split (when needed) and fills base_forecast on all splits.
void attach_baseline(DatasetSplit& split, const BaselineSpec& spec);

}  // namespace crc
