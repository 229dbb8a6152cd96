#pragma once

#include <string>

#include "crc/config.hpp"
#include "crc/corrector.hpp"
#include "crc/graph.hpp"
#include "crc/metrics.hpp"
#include "crc/safety.hpp"
#include "crc/types.hpp"

namespace crc {

/// Calibrates the firewall of a fitted corrector on the validation split.
SafetyPolicy calibrate_corrector(const FittedCorrector& model, const ForecastInstance& val,
                                 const AdjacencyGraph& graph, const RunConfig& config);

struct SplitOutcome {
  CorrectionBundle bundle;
  EvaluationReport report;
};

/// Applies model + frozen policy to one split and evaluates it against its target.
SplitOutcome correct_split(const FittedCorrector& model, const SafetyPolicy& policy, const ForecastInstance& inst,
                           const AdjacencyGraph& graph, const std::string& name);

struct PipelineResult {
  FittedCorrector model;
  SafetyPolicy policy;
  SplitOutcome val;
  SplitOutcome test;
  SafetyCertificate certificate;
  double fit_seconds = 0.0;
  double total_seconds = 0.0;
};

/// fit -> calibrate -> correct (val, test) -> evaluate -> certify.
PipelineResult run_pipeline(const DatasetSplit& split, const AdjacencyGraph& graph, const RunConfig& config,
                            const PipelineOptions& options = {});

}  // namespace crc
