#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crc/config.hpp"
#include "crc/encoder.hpp"
#include "crc/graph.hpp"
#include "crc/mlp.hpp"
#include "crc/ridge.hpp"
#include "crc/safety.hpp"
#include "crc/types.hpp"

namespace crc {

/// Source of the node features fed to the corrector.
enum class FeatureMode {
  encoder,    // [Z, F, A_norm F] from the trained encoder over the graph
  self_only,  // encoder and priors without any cross-node edges
  priors,     // [F, A_norm F] only, no encoder
};

/// Which parts of the hybrid corrector are fitted.
enum class CorrectorMode {
  hybrid,      // ridge floor + nonlinear delta on the post-ridge residual
  ridge_only,  // floor only
  mlp_only,    // nonlinear delta on the raw residual, no floor
};

struct PipelineOptions {
  FeatureMode features = FeatureMode::encoder;
  CorrectorMode corrector = CorrectorMode::hybrid;
  FirewallSwitches firewall;

  /// Nonlinear delta on the raw residual with every firewall stage disabled.
  static PipelineOptions unconstrained_mlp();
};

std::string to_string(FeatureMode m);
std::string to_string(CorrectorMode m);
FeatureMode parse_feature_mode(std::string_view text);
CorrectorMode parse_corrector_mode(std::string_view text);

/// Everything learned before the firewall: encoder, ridge floor and delta.
struct FittedCorrector {
  PipelineOptions options;
  std::string config_hash;
  bool has_encoder = false;
  EncoderParams encoder;
  bool has_ridge = false;
  RidgeModel ridge;
  bool has_mlp = false;
  MlpModel mlp;
  std::vector<EncoderEpoch> encoder_trace;
  std::vector<MlpEpoch> mlp_trace;
};

struct CorrectionDeltas {
  Tensor3 ridge;  // [B x H x N]
  Tensor3 mlp;    // [B x H x N]
};

/// Graph seen by the encoder and priors under `mode`.
AdjacencyGraph feature_graph(const AdjacencyGraph& graph, FeatureMode mode);

/// Z_aug (or the substitute feature tensor) for every window of `history`.
Tensor3 corrector_features(const FittedCorrector& model, const Tensor3& history, const AdjacencyGraph& graph);

/// Two-stage fit: encoder pretraining, then ridge floor and nonlinear delta.
FittedCorrector fit_corrector(const DatasetSplit& split, const AdjacencyGraph& graph, const RunConfig& config,
                              const PipelineOptions& options = {});

CorrectionDeltas predict_deltas(const FittedCorrector& model, const Tensor3& history, const AdjacencyGraph& graph);

/// Versioned JSON checkpoint holding every fitted component.
std::string checkpoint_to_json(const FittedCorrector& model);
FittedCorrector checkpoint_from_json(std::string_view text);
void write_checkpoint(const std::filesystem::path& path, const FittedCorrector& model);
FittedCorrector read_checkpoint(const std::filesystem::path& path);

}  // namespace crc
