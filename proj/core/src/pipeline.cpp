#include "crc/pipeline.hpp"

#include <chrono>

namespace crc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SafetyPolicy calibrate_corrector(const FittedCorrector& model, const ForecastInstance& val,
                                 const AdjacencyGraph& graph, const RunConfig& config) {
  const CorrectionDeltas d = predict_deltas(model, val.history, graph);
  return calibrate_policy(val.base_forecast, val.target_or_throw(), d.ridge, d.mlp, config, model.options.firewall);
}

SplitOutcome correct_split(const FittedCorrector& model, const SafetyPolicy& policy, const ForecastInstance& inst,
                           const AdjacencyGraph& graph, const std::string& name) {
  const CorrectionDeltas d = predict_deltas(model, inst.history, graph);
  SplitOutcome out;
  out.bundle = apply_policy(policy, d.ridge, d.mlp, inst.base_forecast);
  out.report = evaluate(name, inst.base_forecast, out.bundle.corrected, inst.target_or_throw());
  out.report.config_hash = policy.config_hash;
  return out;
}

PipelineResult run_pipeline(const DatasetSplit& split, const AdjacencyGraph& graph, const RunConfig& config,
                            const PipelineOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult r;
  r.model = fit_corrector(split, graph, config, options);
  r.fit_seconds = seconds_since(t0);
  r.policy = calibrate_corrector(r.model, split.val, graph, config);
  r.val = correct_split(r.model, r.policy, split.val, graph, "val");
  r.test = correct_split(r.model, r.policy, split.test, graph, "test");
  r.certificate = certify(r.policy, r.val.report.pair_mae_base, r.val.report.pair_mae_corrected,
                          r.test.report.pair_mae_base, r.test.report.pair_mae_corrected, config.confidence);
  r.total_seconds = seconds_since(t0);
  r.val.report.runtime_seconds = r.total_seconds;
  r.test.report.runtime_seconds = r.total_seconds;
  return r;
}

}  // namespace crc
