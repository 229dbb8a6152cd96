#include "crc/safety.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "crc/csv.hpp"
#include "crc/error.hpp"
#include "crc/metrics.hpp"
#include "json_util.hpp"

namespace crc {

namespace {

using json_util::Json;

constexpr std::array<double, 5> kBlendGrid{0.0, 0.25, 0.5, 0.75, 1.0};

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void check_tau(const Tensor3& t, const Matrix& tau, const std::string& what) {
  if (static_cast<std::size_t>(tau.rows()) != t.dim(2) || static_cast<std::size_t>(tau.cols()) != t.dim(1))
    throw ShapeMismatch(what + ": thresholds are " + std::to_string(tau.rows()) + "x" + std::to_string(tau.cols()) +
                        ", data " + t.shape_string());
}

// c = a * mask[i][h] elementwise over a [B x H x N] tensor.
Tensor3 masked(const Tensor3& t, const Matrix& mask) {
  Tensor3 out = t;
  for (std::size_t b = 0; b < t.dim(0); ++b)
    for (std::size_t h = 0; h < t.dim(1); ++h)
      for (std::size_t i = 0; i < t.dim(2); ++i)
        out(b, h, i) *= mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
  return out;
}

Tensor3 blend(const Tensor3& base, const Tensor3& d_ridge, const Tensor3& d_clip, double w1, double w2) {
  Tensor3 out = base;
  auto o = out.values();
  const auto r = d_ridge.values();
  const auto c = d_clip.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = o[k] + w1 * r[k] + w2 * c[k];
  return out;
}

Json switches_json(const FirewallSwitches& s) {
  Json j;
  j["gating"] = s.gating;
  j["clipping"] = s.clipping;
  j["selection"] = s.selection;
  j["blending"] = s.blending;
  return j;
}

}  // namespace

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyValidation("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Matrix calibrate_clip(const Tensor3& residual, double q) {
  const std::size_t Bn = residual.dim(0), H = residual.dim(1), N = residual.dim(2);
  if (Bn == 0) throw EmptyValidation("clip calibration needs validation residuals");
  Matrix tau(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(H));
  std::vector<double> col(Bn);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t b = 0; b < Bn; ++b) col[b] = std::abs(residual(b, h, i));
      tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = quantile_type7(col, q);
    }
  return tau;
}

Tensor3 apply_clip(const Tensor3& delta, const Matrix& tau) {
  check_tau(delta, tau, "apply_clip");
  Tensor3 out = delta;
  for (std::size_t b = 0; b < delta.dim(0); ++b)
    for (std::size_t h = 0; h < delta.dim(1); ++h)
      for (std::size_t i = 0; i < delta.dim(2); ++i) {
        const double t = tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
        out(b, h, i) = std::clamp(delta(b, h, i), -t, t);
      }
  return out;
}

double apply_gate(double delta, double e_ref, double tau) {
  const bool aligned = sign_of(delta) != 0 && sign_of(delta) == sign_of(e_ref);
  if (!aligned && !(std::abs(delta) <= 0.5 * tau)) return 0.0;
  const double cap = std::abs(e_ref);
  return std::clamp(delta, -cap, cap);
}

Tensor3 apply_gate(const Tensor3& delta, const Tensor3& e_ref, const Matrix& tau) {
  require_same_shape(delta, e_ref, "apply_gate");
  check_tau(delta, tau, "apply_gate");
  Tensor3 out = delta;
  for (std::size_t b = 0; b < delta.dim(0); ++b)
    for (std::size_t h = 0; h < delta.dim(1); ++h)
      for (std::size_t i = 0; i < delta.dim(2); ++i)
        out(b, h, i) = apply_gate(delta(b, h, i), e_ref(b, h, i),
                                  tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)));
  return out;
}

Tensor3 audit_gate_clip(const Tensor3& delta, const Tensor3& residual, const Matrix& tau) {
  return apply_clip(apply_gate(delta, residual, tau), tau);
}

Matrix calibrate_gate_mask(const Tensor3& residual, const Tensor3& delta, double margin) {
  require_same_shape(residual, delta, "gate calibration");
  const std::size_t Bn = residual.dim(0), H = residual.dim(1), N = residual.dim(2);
  if (Bn == 0) throw EmptyValidation("gate calibration needs validation residuals");
  Matrix mask(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(H));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t h = 0; h < H; ++h) {
      std::size_t agree = 0;
      for (std::size_t b = 0; b < Bn; ++b)
        if (sign_of(delta(b, h, i)) == sign_of(residual(b, h, i))) ++agree;
      const double rate = static_cast<double>(agree) / static_cast<double>(Bn);
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = rate >= 0.5 + margin ? 1.0 : 0.0;
    }
  return mask;
}

Matrix calibrate_selection(const Matrix& linear_mae, const Matrix& hybrid_mae) {
  if (linear_mae.rows() != hybrid_mae.rows() || linear_mae.cols() != hybrid_mae.cols())
    throw ShapeMismatch("selection tables differ in shape");
  return (hybrid_mae.array() < linear_mae.array()).cast<double>().matrix();
}

BlendResult calibrate_blend(const Tensor3& base, const Tensor3& truth, const Tensor3& d_ridge, const Tensor3& d_clip,
                            double epsilon) {
  require_same_shape(base, truth, "blend base");
  require_same_shape(d_ridge, truth, "blend ridge delta");
  require_same_shape(d_clip, truth, "blend clipped delta");
  if (truth.dim(0) == 0) throw EmptyValidation("blend calibration needs validation samples");
  BlendResult r;
  r.base_mae = mae(base, truth);
  r.best_mae = r.base_mae;
  for (double w1 : kBlendGrid)
    for (double w2 : kBlendGrid) {
      const double m = mae(blend(base, d_ridge, d_clip, w1, w2), truth);
      if (m < r.best_mae) {
        r.best_mae = m;
        r.w1 = w1;
        r.w2 = w2;
      }
    }
  r.relative_improvement = r.base_mae > 0.0 ? (r.base_mae - r.best_mae) / r.base_mae : 0.0;
  r.active = r.relative_improvement >= epsilon && r.best_mae < r.base_mae;
  if (!r.active) {
    r.w1 = 0.0;
    r.w2 = 0.0;
  }
  return r;
}

CorrectionBundle apply_policy(const SafetyPolicy& policy, const Tensor3& delta_ridge, const Tensor3& delta_mlp,
                              const Tensor3& base) {
  require_same_shape(delta_ridge, base, "ridge delta vs base");
  require_same_shape(delta_mlp, base, "MLP delta vs base");
  check_tau(base, policy.tau, "policy");
  CorrectionBundle out;
  out.delta_ridge = delta_ridge;
  out.delta_mlp = delta_mlp;
  out.unconstrained = delta_ridge + delta_mlp;
  Tensor3 d = masked(masked(delta_mlp, policy.gate_mask), policy.selection);
  out.delta_clip = policy.switches.clipping ? apply_clip(d, policy.tau) : std::move(d);
  out.corrected = policy.active ? blend(base, delta_ridge, out.delta_clip, policy.w1, policy.w2) : base;
  return out;
}

SafetyPolicy calibrate_policy(const Tensor3& base, const Tensor3& truth, const Tensor3& delta_ridge,
                              const Tensor3& delta_mlp, const RunConfig& config, const FirewallSwitches& switches) {
  require_same_shape(base, truth, "validation base");
  if (truth.dim(0) == 0) throw EmptyValidation("policy calibration needs validation samples");
  SafetyPolicy p;
  p.epsilon = config.epsilon;
  p.quantile_q = config.quantile_q;
  p.gate_margin = config.gate_margin;
  p.switches = switches;
  p.config_hash = config.hash();
  p.seed = config.seed;

  const Tensor3 e = truth - base - delta_ridge;
  const auto N = static_cast<Eigen::Index>(truth.dim(2)), H = static_cast<Eigen::Index>(truth.dim(1));
  p.tau = calibrate_clip(e, config.quantile_q);
  p.gate_mask = switches.gating ? calibrate_gate_mask(e, delta_mlp, config.gate_margin) : Matrix::Ones(N, H);

  const Tensor3 linear = base + delta_ridge;
  Tensor3 gated = masked(delta_mlp, p.gate_mask);
  if (switches.clipping) gated = apply_clip(gated, p.tau);
  p.selection = switches.selection ? calibrate_selection(pair_mae(linear, truth), pair_mae(linear + gated, truth))
                                   : Matrix::Ones(N, H);
  p.val_mae_base = mae(base, truth);
  p.val_mae_linear = mae(linear, truth);

  const Tensor3 d_clip = masked(gated, p.selection);
  if (switches.blending) {
    const BlendResult b = calibrate_blend(base, truth, delta_ridge, d_clip, config.epsilon);
    p.w1 = b.w1;
    p.w2 = b.w2;
    p.active = b.active;
    p.relative_improvement = b.relative_improvement;
  } else {
    p.w1 = 1.0;
    p.w2 = 1.0;
    p.active = true;
  }
  p.val_mae_deployed = mae(apply_policy(p, delta_ridge, delta_mlp, base).corrected, truth);
  if (!switches.blending)
    p.relative_improvement = p.val_mae_base > 0.0 ? (p.val_mae_base - p.val_mae_deployed) / p.val_mae_base : 0.0;
  return p;
}

std::string SafetyPolicy::to_json() const {
  Json j;
  j["format"] = "crc-policy";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["nodes"] = nodes();
  j["horizon"] = horizon();
  j["quantile_q"] = quantile_q;
  j["epsilon"] = epsilon;
  j["gate_margin"] = gate_margin;
  j["switches"] = switches_json(switches);
  j["active"] = active;
  j["w1"] = w1;
  j["w2"] = w2;
  j["validation"] = {{"mae_base", val_mae_base},
                     {"mae_linear", val_mae_linear},
                     {"mae_deployed", val_mae_deployed},
                     {"relative_improvement", relative_improvement}};
  j["tau"] = json_util::matrix_to_json(tau);
  j["gate_mask"] = json_util::matrix_to_json(gate_mask);
  j["selection"] = json_util::matrix_to_json(selection);
  return j.dump(2) + "\n";
}

SafetyPolicy SafetyPolicy::from_json(std::string_view text) {
  const Json j = json_util::parse(text, "crc-policy");
  SafetyPolicy p;
  try {
    p.config_hash = j.at("config_hash").get<std::string>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.quantile_q = j.at("quantile_q").get<double>();
    p.epsilon = j.at("epsilon").get<double>();
    p.gate_margin = j.at("gate_margin").get<double>();
    const auto& s = j.at("switches");
    p.switches = {s.at("gating").get<bool>(), s.at("clipping").get<bool>(), s.at("selection").get<bool>(),
                  s.at("blending").get<bool>()};
    p.active = j.at("active").get<bool>();
    p.w1 = j.at("w1").get<double>();
    p.w2 = j.at("w2").get<double>();
    const auto& v = j.at("validation");
    p.val_mae_base = v.at("mae_base").get<double>();
    p.val_mae_linear = v.at("mae_linear").get<double>();
    p.val_mae_deployed = v.at("mae_deployed").get<double>();
    p.relative_improvement = v.at("relative_improvement").get<double>();
    p.tau = json_util::matrix_from_json(j.at("tau"));
    p.gate_mask = json_util::matrix_from_json(j.at("gate_mask"));
    p.selection = json_util::matrix_from_json(j.at("selection"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy: ") + e.what());
  }
  const auto same = [&](const Matrix& m) { return m.rows() == p.tau.rows() && m.cols() == p.tau.cols(); };
  if (!same(p.gate_mask) || !same(p.selection)) throw ParseError("policy: table shapes differ");
  if ((p.tau.array() < 0.0).any()) throw ParseError("policy: negative clip threshold");
  return p;
}

void SafetyPolicy::write(const std::filesystem::path& path) const { write_text(path, to_json()); }

SafetyPolicy SafetyPolicy::read(const std::filesystem::path& path) { return from_json(read_text(path)); }

double hoeffding_term(std::size_t m, double confidence) {
  if (m == 0) throw EmptyValidation("Hoeffding bound needs m > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
  return std::sqrt(std::log(1.0 / confidence) / (2.0 * static_cast<double>(m)));
}

SafetyCertificate certify(const SafetyPolicy& policy, const Matrix& val_base_mae, const Matrix& val_deployed_mae,
                          const Matrix& test_base_mae, const Matrix& test_deployed_mae, double confidence,
                          bool with_error_bound) {
  if (val_base_mae.size() == 0) throw EmptyValidation("certificate needs validation pairs");
  SafetyCertificate c;
  c.ndr_val = ndr(val_base_mae, val_deployed_mae);
  c.ndr_test = ndr(test_base_mae, test_deployed_mae);
  c.m = static_cast<std::size_t>(val_base_mae.size());
  c.indicators.reserve(c.m);
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < val_base_mae.rows(); ++i)
    for (Eigen::Index h = 0; h < val_base_mae.cols(); ++h) {
      const bool z = val_deployed_mae(i, h) <= val_base_mae(i, h);
      c.indicators.push_back(z ? 1 : 0);
      ok += z;
    }
  c.z_bar_val = static_cast<double>(ok) / static_cast<double>(c.m);
  c.confidence = confidence;
  c.hoeffding = hoeffding_term(c.m, confidence);
  c.pand_bound = c.z_bar_val - c.hoeffding;
  c.slack = 1.0 - c.z_bar_val;
  if (with_error_bound) c.error_bound = std::max(val_deployed_mae.maxCoeff(), val_base_mae.maxCoeff());
  c.policy_active = policy.active;
  c.config_hash = policy.config_hash;
  c.seed = policy.seed;
  return c;
}

std::string SafetyCertificate::to_json() const {
  Json j;
  j["format"] = "crc-certificate";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["policy_active"] = policy_active;
  j["pair_statistic"] = "mae";
  j["m"] = m;
  j["z_bar_val"] = z_bar_val;
  j["ndr_val"] = ndr_val;
  j["ndr_test"] = ndr_test;
  j["confidence"] = confidence;
  j["hoeffding_term"] = hoeffding;
  j["pand_bound"] = pand_bound;
  j["slack"] = slack;
  if (error_bound) {
    j["error_bound"] = *error_bound;
    j["error_bound_note"] = "empirical maximum of per-pair validation MAE; not a population bound";
  }
  j["indicators"] = indicators;
  return j.dump(2) + "\n";
}

SafetyCertificate SafetyCertificate::from_json(std::string_view text) {
  const Json j = json_util::parse(text, "crc-certificate");
  SafetyCertificate c;
  try {
    c.config_hash = j.at("config_hash").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.policy_active = j.at("policy_active").get<bool>();
    c.m = j.at("m").get<std::size_t>();
    c.z_bar_val = j.at("z_bar_val").get<double>();
    c.ndr_val = j.at("ndr_val").get<double>();
    c.ndr_test = j.at("ndr_test").get<double>();
    c.confidence = j.at("confidence").get<double>();
    c.hoeffding = j.at("hoeffding_term").get<double>();
    c.pand_bound = j.at("pand_bound").get<double>();
    c.slack = j.at("slack").get<double>();
    if (j.contains("error_bound")) c.error_bound = j.at("error_bound").get<double>();
    c.indicators = j.at("indicators").get<std::vector<std::uint8_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  if (c.indicators.size() != c.m) throw ParseError("certificate: indicator count differs from m");
  return c;
}

void SafetyCertificate::write(const std::filesystem::path& path) const { write_text(path, to_json()); }

SafetyCertificate SafetyCertificate::read(const std::filesystem::path& path) { return from_json(read_text(path)); }

}  // namespace crc
