#include "crc/params.hpp"

#include <cmath>

#include "crc/error.hpp"

namespace crc {

std::size_t ParamSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  Block b{std::move(name), values_.size(), rows, cols};
  values_.resize(values_.size() + static_cast<std::size_t>(rows * cols), 0.0);
  blocks_.push_back(std::move(b));
  return blocks_.size() - 1;
}

Eigen::Map<Matrix> ParamSet::mat(std::size_t block) {
  const Block& b = blocks_[block];
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Matrix> ParamSet::mat(std::size_t block) const {
  const Block& b = blocks_[block];
  return {values_.data() + b.offset, b.rows, b.cols};
}

ParamSet ParamSet::zeros_like() const {
  ParamSet z = *this;
  z.set_zero();
  return z;
}

void ParamSet::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void ParamSet::randomize(std::size_t block, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  auto m = mat(block);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& a = blocks_[i];
    const auto& b = other.blocks_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double lr, double weight_decay, double beta1,
                             double beta2, double eps)
    : lr_(lr), decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ShapeMismatch("optimizer size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    if (decay_ > 0.0) params[i] -= lr_ * decay_ * params[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace crc
