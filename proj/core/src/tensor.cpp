#include "crc/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "crc/error.hpp"

namespace crc {

Tensor3 Tensor3::slice(std::size_t first, std::size_t count) const {
  if (first + count > dims_[0]) {
    throw ShapeMismatch("slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
                        ") outside " + shape_string());
  }
  Tensor3 out(count, dims_[1], dims_[2]);
  const std::size_t stride = dims_[1] * dims_[2];
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * stride), count * stride,
              out.data_.begin());
  return out;
}

std::vector<double> Tensor3::series(std::size_t sample, std::size_t node) const {
  std::vector<double> out(dims_[1]);
  for (std::size_t t = 0; t < dims_[1]; ++t) out[t] = (*this)(sample, t, node);
  return out;
}

std::string Tensor3::shape_string() const {
  std::ostringstream os;
  os << '[' << dims_[0] << 'x' << dims_[1] << 'x' << dims_[2] << ']';
  return os.str();
}

void require_same_shape(const Tensor3& a, const Tensor3& b, const std::string& what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(what + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b, "tensor add");
  Tensor3 out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
  return out;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b, "tensor subtract");
  Tensor3 out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  return out;
}

Tensor3 operator*(double s, const Tensor3& a) {
  Tensor3 out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

}  // namespace crc
