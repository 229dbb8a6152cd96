#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "crc/tensor.hpp"

namespace crc {

double mse(const Tensor3& pred, const Tensor3& truth);
double mae(const Tensor3& pred, const Tensor3& truth);

/// Per-(node, horizon) error over samples of [B x H x N] tensors; [N x H].
Matrix pair_mae(const Tensor3& pred, const Tensor3& truth);
Matrix pair_mse(const Tensor3& pred, const Tensor3& truth);

/// Fraction of pairs with corrected <= baseline (ties are non-degraded).
double ndr(const Matrix& baseline, const Matrix& corrected);

struct EvaluationReport {
  std::string split;
  std::size_t samples = 0;
  std::size_t nodes = 0;
  std::size_t horizon = 0;
  double mse_base = 0.0, mae_base = 0.0;
  double mse_corrected = 0.0, mae_corrected = 0.0;
  Matrix pair_mae_base, pair_mae_corrected;  // [N x H]
  Matrix pair_mse_base, pair_mse_corrected;  // [N x H]
  double ndr = 1.0;
  double runtime_seconds = 0.0;
  std::string config_hash;

  double delta_mse() const { return mse_corrected - mse_base; }
  double delta_mae() const { return mae_corrected - mae_base; }

  std::string to_json() const;
  static EvaluationReport from_json(std::string_view text);
  void write(const std::filesystem::path& path) const;
  static EvaluationReport read(const std::filesystem::path& path);

  /// Flat per-pair table: node,horizon,mae_base,mae_corrected,mse_base,mse_corrected.
  std::string pairs_csv() const;
};

EvaluationReport evaluate(const std::string& split, const Tensor3& base, const Tensor3& corrected,
                          const Tensor3& truth);

}  // namespace crc
