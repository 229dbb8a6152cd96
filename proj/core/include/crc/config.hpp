#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crc/kvfile.hpp"

namespace crc {

/// Every tunable of the correction pipeline. Defaults follow the reference
/// experimental setup (K = 5, Q = 0.80, epsilon = 0.01, lr 1e-4, batch 32).
struct RunConfig {
  // graph
  std::size_t knn_k = 5;
  // firewall
  double quantile_q = 0.80;
  double epsilon = 0.01;
  double gate_margin = 0.05;
  double confidence = 0.05;
  // ridge floor
  double ridge_lambda = 1.0;
  std::vector<double> ridge_lambda_grid{0.01, 0.1, 1.0, 10.0};
  // encoder
  std::size_t latent_dim = 8;
  double encoder_lr = 1e-4;
  double encoder_weight_decay = 0.01;
  std::size_t encoder_epochs = 80;
  // nonlinear delta
  std::size_t mlp_hidden = 64;
  std::size_t node_embedding_dim = 8;
  double mlp_lr = 1e-4;
  std::size_t mlp_epochs = 60;
  // shared training
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  std::uint64_t seed = 42;

  /// Throws ConfigError when an invariant (0 < Q <= 1, epsilon >= 0, ...) fails.
  void validate() const;
  /// Additional check once the node count is known (K < N).
  void validate_for_nodes(std::size_t nodes) const;

  KvFile to_kv() const;
  /// Unknown keys are rejected; missing keys keep their defaults.
  static RunConfig from_kv(const KvFile& kv);
  static RunConfig read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

  /// Fingerprint of the canonical serialization.
  std::string hash() const;
};

}  // namespace crc
