#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense row-major rank-3 tensor of doubles.
///
/// Axis convention throughout the library is [sample, time, node]: history
/// windows are [B x P x N], forecasts and targets are [B x H x N].
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t d0, std::size_t d1, std::size_t d2, double fill = 0.0)
      : dims_{d0, d1, d2}, data_(d0 * d1 * d2, fill) {}

  std::size_t dim(std::size_t axis) const { return dims_[axis]; }
  const std::array<std::size_t, 3>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// Copies sample rows [first, first + count) into a new tensor.
  Tensor3 slice(std::size_t first, std::size_t count) const;

  /// Series of `node` within sample `sample` along axis 1.
  std::vector<double> series(std::size_t sample, std::size_t node) const;

  bool same_shape(const Tensor3& other) const { return dims_ == other.dims_; }
  std::string shape_string() const;

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<double> data_;
};

Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);
Tensor3 operator*(double s, const Tensor3& a);

/// Throws ShapeMismatch naming `what` when the shapes differ.
void require_same_shape(const Tensor3& a, const Tensor3& b, const std::string& what);

}  // namespace crc
