#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crc/config.hpp"
#include "crc/params.hpp"
#include "crc/rng.hpp"
#include "crc/tensor.hpp"

namespace crc {

/// One-hidden-layer tanh network shared by all nodes. Input of node i is its
/// standardized Z_aug row concatenated with a learned node embedding:
///   out = W2 tanh(W1 [x; e_i] + b1) + b2.
/// The output layer starts at zero, so an untrained model predicts 0.
class MlpModel {
 public:
  enum Block : std::size_t { embedding, w1, b1, w2, b2 };

  MlpModel() = default;
  MlpModel(std::size_t features, std::size_t nodes, std::size_t horizon, std::size_t hidden,
           std::size_t embedding_dim);

  static MlpModel initialized(std::size_t features, std::size_t nodes, std::size_t horizon,
                              std::size_t hidden, std::size_t embedding_dim, Rng& rng);

  std::size_t features() const { return features_; }
  std::size_t nodes() const { return nodes_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t embedding_dim() const { return embedding_dim_; }

  ParamSet weights;
  // Input standardization fitted on the training features.
  std::vector<double> input_mean;
  std::vector<double> input_scale;

  /// Sets input_mean / input_scale from a [B x N x D] feature tensor.
  void fit_input_scaling(const Tensor3& features);

 private:
  std::size_t features_ = 0, nodes_ = 0, horizon_ = 0, hidden_ = 0, embedding_dim_ = 0;
};

/// Delta^MLP for every node and sample; returns [B x H x N].
Tensor3 predict_mlp(const MlpModel& model, const Tensor3& features);

/// Mean squared error against `target` ([B x H x N]) over samples `index`.
/// Writes d(loss)/d(weights) into `grad` when non-null.
double mlp_objective(const MlpModel& model, const Tensor3& features, const Tensor3& target,
                     std::span<const std::size_t> index, ParamSet* grad);

struct MlpEpoch {
  double train_loss = 0.0;
  double val_mae = 0.0;
};

struct MlpTrainingResult {
  MlpModel model;
  std::vector<MlpEpoch> trace;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

/// Adam on the post-ridge residual with early stopping on validation MAE;
/// the best weights are restored. Throws NonFiniteLoss on divergence.
MlpTrainingResult fit_mlp(const MlpModel& init, const Tensor3& train_features, const Tensor3& train_target,
                          const Tensor3& val_features, const Tensor3& val_target, const RunConfig& config);

/// Seeded initialization (hidden width and embedding size from `config`).
MlpTrainingResult fit_mlp(const Tensor3& train_features, const Tensor3& train_target,
                          const Tensor3& val_features, const Tensor3& val_target, const RunConfig& config);

}  // namespace crc
