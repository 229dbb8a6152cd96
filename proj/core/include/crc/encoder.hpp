#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crc/config.hpp"
#include "crc/graph.hpp"
#include "crc/params.hpp"
#include "crc/priors.hpp"
#include "crc/rng.hpp"
#include "crc/tensor.hpp"
#include "crc/types.hpp"

namespace crc {

/// Weights of the shared pairwise interaction module.
///
/// Summarizer s: R^P -> R^d is a linear projection followed by two residual
/// blocks h <- h + W_b tanh(W_a h + b_a) + b_b. The interaction head maps a
/// (target, source) pair of summaries to a 2x2 matrix with entries
/// M[a][b] = u_a^T B_ab u_b + c_ab, where u_0 is the target and u_1 the source.
class EncoderParams {
 public:
  enum Block : std::size_t {
    proj_w, proj_b,
    res1_wa, res1_ba, res1_wb, res1_bb,
    res2_wa, res2_ba, res2_wb, res2_bb,
    head_00, head_01, head_10, head_11,
    head_bias,  // 4 x 1: c00, c01, c10, c11
    block_count
  };

  EncoderParams() = default;
  EncoderParams(std::size_t lookback, std::size_t latent);

  /// Seeded random initialization.
  static EncoderParams initialized(std::size_t lookback, std::size_t latent, Rng& rng);

  std::size_t lookback() const { return lookback_; }
  std::size_t latent() const { return latent_; }

  ParamSet weights;
  // Affine input normalization fixed from the training windows.
  double input_mean = 0.0;
  double input_scale = 1.0;
  // Constant added to the neighbor count in the aggregation denominator.
  double self_const = 1.0;

 private:
  std::size_t lookback_ = 0;
  std::size_t latent_ = 0;
};

struct PairRepresentation {
  Matrix rep;         // [B x d], summary of the source series
  Vector gate;        // [B], tanh(M[0][1]), influence source -> target
  Vector self_gate;   // [B], tanh(M[0][0])
  Matrix interaction; // [B x 4], M row-major
};

/// Applies the summarizer to each row of `series` ([B x P]); returns [B x d].
Matrix summarize(const EncoderParams& params, const Matrix& series);

/// Argument order is (target, source).
PairRepresentation pair_forward(const EncoderParams& params, const Matrix& target, const Matrix& source);

/// Z_i = (a_ii R_i + sum_j a_ji R_j) / (|N(i)| + self_const).
Matrix aggregate(const PairRepresentation& self, std::span<const PairRepresentation> neighbors,
                 double self_const = 1.0);

struct NodeEmbedding {
  Tensor3 z;      // [B x N x d]
  Tensor3 z_aug;  // [B x N x (d + 2q)] = [Z, F, A_norm F]
};

/// Columns of `history` for one node as a [B x P] matrix.
Matrix node_windows(const Tensor3& history, std::size_t node);

NodeEmbedding encode(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph);

/// Z_aug for precomputed priors (avoids recomputing statistics).
NodeEmbedding encode(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph,
                     const FeaturePriors& priors);

/// Mean |gate| over the batch: entry (i, j) for j in N(i), diagonal for the
/// self gate, zero elsewhere.
Matrix influence_snapshot(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph);

/// Inputs of the encoder pretraining objective.
struct EncoderTrainingData {
  Tensor3 history;   // [B x P x N]
  Tensor3 priors;    // [B x N x 2q], standardized [F, A_norm F]
  Tensor3 residual;  // [B x H x N]
};

/// Per-column standardization of the prior features, fitted on training data.
struct PriorScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static PriorScaler fit(const FeaturePriors& priors);
  Tensor3 apply(const FeaturePriors& priors) const;
};

/// Disposable linear readout Z_aug -> H residual steps, shared by all nodes.
struct Readout {
  enum Block : std::size_t { weight, bias };
  ParamSet weights;

  Readout() = default;
  Readout(std::size_t features, std::size_t horizon);
};

/// Mean squared readout error over the samples `index`. When gradient
/// pointers are non-null, they receive d(loss)/d(params) (overwritten).
double encoder_objective(const EncoderParams& params, const Readout& readout,
                         const EncoderTrainingData& data, const AdjacencyGraph& graph,
                         std::span<const std::size_t> index, EncoderParams* grad_params,
                         Readout* grad_readout);

/// Mean absolute readout error over all samples of `data`.
double encoder_readout_mae(const EncoderParams& params, const Readout& readout,
                           const EncoderTrainingData& data, const AdjacencyGraph& graph);

struct EncoderEpoch {
  double train_loss = 0.0;
  double val_mae = 0.0;
};

struct EncoderTrainingResult {
  EncoderParams params;
  std::vector<EncoderEpoch> trace;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

/// Pretrains the encoder against the raw residual with a discarded linear
/// readout (AdamW, early stopping on validation MAE, best weights restored).
/// Throws NonFiniteLoss if the objective diverges.
EncoderTrainingResult train_encoder(const EncoderParams& init, const ForecastInstance& train,
                                    const ForecastInstance& val, const AdjacencyGraph& graph,
                                    const RunConfig& config);

/// Seeded initialization with the input normalization fitted on `train`.
EncoderTrainingResult train_encoder(const ForecastInstance& train, const ForecastInstance& val,
                                    const AdjacencyGraph& graph, const RunConfig& config);

}  // namespace crc
