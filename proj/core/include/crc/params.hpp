#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crc/rng.hpp"
#include "crc/tensor.hpp"

namespace crc {

/// Named dense blocks laid out contiguously in one flat vector, so
/// optimizers, checkpoints and finite-difference checks see a single array.
/// Blocks are column-major (Eigen's default).
class ParamSet {
 public:
  struct Block {
    std::string name;
    std::size_t offset = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
  };

  /// Appends a zero-initialized block and returns its index.
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols);

  Eigen::Map<Matrix> mat(std::size_t block);
  Eigen::Map<const Matrix> mat(std::size_t block) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return values_.size(); }

  /// A zero vector with the same layout (for gradients).
  ParamSet zeros_like() const;
  void set_zero();

  /// Fills a block with N(0, stddev^2).
  void randomize(std::size_t block, double stddev, Rng& rng);

  bool same_layout(const ParamSet& other) const;

 private:
  std::vector<Block> blocks_;
  std::vector<double> values_;
};

/// Adam with optional decoupled weight decay (AdamW when decay > 0).
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double lr, double weight_decay = 0.0, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void step(std::vector<double>& params, const std::vector<double>& grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, decay_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace crc
