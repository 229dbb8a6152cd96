#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crc/config.hpp"
#include "crc/tensor.hpp"

namespace crc {

/// Type-7 quantile (linear interpolation between order statistics) of
/// `values` at level q in [0, 1]. Throws EmptyValidation on empty input.
double quantile_type7(std::vector<double> values, double q);

/// tau[i][h] = Q-quantile of |e(b, h, i)| over samples b; returns [N x H].
Matrix calibrate_clip(const Tensor3& residual, double q);

/// Elementwise clamp of a [B x H x N] tensor into [-tau[i][h], tau[i][h]].
Tensor3 apply_clip(const Tensor3& delta, const Matrix& tau);

/// Admits `delta` iff it shares the sign of `e_ref` or |delta| <= tau / 2,
/// and caps the admitted magnitude at |e_ref|. Inadmissible updates become 0.
double apply_gate(double delta, double e_ref, double tau);
Tensor3 apply_gate(const Tensor3& delta, const Tensor3& e_ref, const Matrix& tau);

/// Audit mode with the true residual known: clip(apply_gate(delta, e, tau), tau).
Tensor3 audit_gate_clip(const Tensor3& delta, const Tensor3& residual, const Matrix& tau);

/// mask[i][h] = 1 iff the fraction of samples with sign(delta) == sign(e)
/// reaches 0.5 + margin. Returns [N x H] of 0/1.
Matrix calibrate_gate_mask(const Tensor3& residual, const Tensor3& delta, double margin);

/// selection[i][h] = 1 (hybrid) iff hybrid MAE is strictly below linear-only.
Matrix calibrate_selection(const Matrix& linear_mae, const Matrix& hybrid_mae);

struct BlendResult {
  double w1 = 0.0;
  double w2 = 0.0;
  bool active = false;
  double base_mae = 0.0;
  double best_mae = 0.0;
  double relative_improvement = 0.0;
};

/// Grid search over (w1, w2) in {0, .25, .5, .75, 1}^2 for the validation
/// MAE of base + w1 * d_ridge + w2 * d_clip. Activates iff the relative
/// improvement over base is at least epsilon; otherwise (w1, w2) = (0, 0).
BlendResult calibrate_blend(const Tensor3& base, const Tensor3& truth, const Tensor3& d_ridge,
                            const Tensor3& d_clip, double epsilon);

/// Firewall mechanisms that can be switched off for ablations.
struct FirewallSwitches {
  bool gating = true;
  bool clipping = true;
  bool selection = true;
  bool blending = true;
};

/// Frozen firewall calibrated on validation.
struct SafetyPolicy {
  Matrix tau;        // [N x H]
  Matrix gate_mask;  // [N x H], 1 = nonlinear delta admitted
  Matrix selection;  // [N x H], 1 = hybrid, 0 = linear-only
  double w1 = 0.0;
  double w2 = 0.0;
  bool active = false;
  double epsilon = 0.01;
  double quantile_q = 0.8;
  double gate_margin = 0.05;
  FirewallSwitches switches;

  // Validation diagnostics recorded at calibration time.
  double val_mae_base = 0.0;
  double val_mae_linear = 0.0;
  double val_mae_deployed = 0.0;
  double relative_improvement = 0.0;

  std::string config_hash;
  std::uint64_t seed = 0;

  std::size_t nodes() const { return static_cast<std::size_t>(tau.rows()); }
  std::size_t horizon() const { return static_cast<std::size_t>(tau.cols()); }

  std::string to_json() const;
  static SafetyPolicy from_json(std::string_view text);
  void write(const std::filesystem::path& path) const;
  static SafetyPolicy read(const std::filesystem::path& path);
};

struct CorrectionBundle {
  Tensor3 delta_ridge;
  Tensor3 delta_mlp;
  Tensor3 unconstrained;  // delta_ridge + delta_mlp, before the firewall
  Tensor3 delta_clip;     // nonlinear delta after mask, selection and clip
  Tensor3 corrected;      // base + w1 * delta_ridge + w2 * delta_clip
};

/// Firewall applied in the order mask -> selection -> clip -> blend. A
/// deactivated policy returns a copy of `base`.
CorrectionBundle apply_policy(const SafetyPolicy& policy, const Tensor3& delta_ridge, const Tensor3& delta_mlp,
                              const Tensor3& base);

/// Calibrates every stage on validation data.
SafetyPolicy calibrate_policy(const Tensor3& base, const Tensor3& truth, const Tensor3& delta_ridge,
                              const Tensor3& delta_mlp, const RunConfig& config,
                              const FirewallSwitches& switches = {});

/// sqrt(ln(1/confidence) / (2 m)).
double hoeffding_term(std::size_t m, double confidence);

struct SafetyCertificate {
  std::vector<std::uint8_t> indicators;  // Z_k per validation (node, horizon) pair, node-major
  std::size_t m = 0;
  double z_bar_val = 0.0;
  double ndr_val = 0.0;
  double ndr_test = 0.0;
  double confidence = 0.05;
  double hoeffding = 0.0;
  double pand_bound = 0.0;
  double slack = 0.0;                  // 1 - z_bar_val
  std::optional<double> error_bound;   // empirical maximum per-pair MAE
  bool policy_active = false;
  std::string config_hash;
  std::uint64_t seed = 0;

  /// Recomputes the bound from (z_bar_val, m, confidence).
  double recomputed_bound() const { return z_bar_val - hoeffding_term(m, confidence); }

  std::string to_json() const;
  static SafetyCertificate from_json(std::string_view text);
  void write(const std::filesystem::path& path) const;
  static SafetyCertificate read(const std::filesystem::path& path);
};

/// Builds the certificate from per-pair MAE tables ([N x H]) of the
/// baseline and deployed forecasts on validation and test.
SafetyCertificate certify(const SafetyPolicy& policy, const Matrix& val_base_mae, const Matrix& val_deployed_mae,
                          const Matrix& test_base_mae, const Matrix& test_deployed_mae, double confidence,
                          bool with_error_bound = false);

}  // namespace crc
