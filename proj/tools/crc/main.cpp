// crc: stage-per-subcommand driver for the residual correction pipeline.
//
// Every command works on a workspace directory (--out). Stages record their
// input and output hashes in <out>/manifest.json; a stage refuses to run on
// inputs that changed since the producing stage wrote them.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crc/baseline.hpp"
#include "crc/config.hpp"
#include "crc/corrector.hpp"
#include "crc/csv.hpp"
#include "crc/dataset_io.hpp"
#include "crc/error.hpp"
#include "crc/graph.hpp"
#include "crc/hash.hpp"
#include "crc/ingest.hpp"
#include "crc/manifest.hpp"
#include "crc/metrics.hpp"
#include "crc/pipeline.hpp"
#include "crc/safety.hpp"
#include "crc/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kReverted = 2,
  kBadInput = 3,
  kStale = 4,
  kFailure = 5,
  kInternal = 6,
};

const char* kSplitNames[] = {"val", "test"};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> quantile_q, epsilon, ridge_lambda, confidence;
  std::optional<std::size_t> knn_k;
};

struct Globals {
  fs::path out = "crc_work";
  std::string config_path;
  Overrides ov;
};

crc::RunConfig resolve_config(const Globals& g) {
  crc::RunConfig c;
  if (!g.config_path.empty()) {
    c = crc::RunConfig::read(g.config_path);
  } else if (fs::exists(g.out / "config.kv")) {
    c = crc::RunConfig::read(g.out / "config.kv");
  }
  if (g.ov.seed) c.seed = *g.ov.seed;
  if (g.ov.quantile_q) c.quantile_q = *g.ov.quantile_q;
  if (g.ov.epsilon) c.epsilon = *g.ov.epsilon;
  if (g.ov.knn_k) c.knn_k = *g.ov.knn_k;
  if (g.ov.confidence) c.confidence = *g.ov.confidence;
  if (g.ov.ridge_lambda) {
    c.ridge_lambda = *g.ov.ridge_lambda;
    c.ridge_lambda_grid = {*g.ov.ridge_lambda};
  }
  c.validate();
  fs::create_directories(g.out);
  c.write(g.out / "config.kv");
  return c;
}

class StageTimer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::vector<std::string> prefixed(const std::string& dir, const std::vector<std::string>& files) {
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(dir + "/" + f);
  return out;
}

std::vector<std::string> dataset_inputs(const fs::path& root) {
  const auto data = crc::read_dataset(root / "dataset");
  return prefixed("dataset", crc::dataset_files(data));
}

void record(const Globals& g, crc::PipelineManifest& m, const std::string& stage,
            std::map<std::string, std::string> inputs, const std::vector<std::string>& outputs,
            const crc::RunConfig& cfg, const StageTimer& timer) {
  crc::StageRecord r;
  r.stage = stage;
  r.inputs = std::move(inputs);
  r.outputs = crc::hash_outputs(g.out, outputs);
  r.seed = cfg.seed;
  r.config_hash = cfg.hash();
  r.wall_seconds = timer.seconds();
  m.record(std::move(r));
  m.save(g.out);
}

void require_hash(const std::string& what, const std::string& have, const std::string& want) {
  if (have != want)
    throw crc::StaleInput(what + " was produced under config " + have + ", current config is " + want +
                          "; rerun the producing stage");
}

std::size_t node_count(const fs::path& root) {
  return crc::KvFile::read(root / "dataset" / "meta.kv").get_int("nodes");
}

crc::AdjacencyGraph load_graph(const fs::path& root) {
  return crc::read_edge_list(root / "graph.csv", node_count(root));
}

const crc::ForecastInstance& split_of(const crc::DatasetSplit& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "val") return s.val;
  if (name == "test") return s.test;
  throw crc::ConfigError("unknown split '" + name + "'");
}

// ---- stages ---------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::size_t nodes = 8, length = 1000, lookback = 96, horizon = 24;
  std::string noise = "gaussian";
  double sigma = 0.1, quadratic = 0.0, cross_strength = 0.3;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  crc::SyntheticSpec spec;
  if (!a.spec.empty()) {
    spec = crc::SyntheticSpec::from_kv(crc::KvFile::read(a.spec));
    if (g.ov.seed) spec.seed = *g.ov.seed;
  } else {
    crc::RandomSpecOptions o;
    o.nodes = a.nodes;
    o.length = a.length;
    o.seed = cfg.seed;
    o.sigma = a.sigma;
    o.scale = a.sigma;
    o.quadratic = a.quadratic;
    o.cross_strength = a.cross_strength;
    if (a.noise == "student_t") o.noise = crc::NoiseKind::student_t;
    else if (a.noise != "gaussian") throw crc::ConfigError("noise must be gaussian or student_t");
    spec = crc::random_spec(o);
  }
  crc::Shape shape;
  shape.nodes = spec.nodes;
  shape.lookback = a.lookback;
  shape.horizon = a.horizon;
  shape.validate();
  const auto ds = crc::generate_synthetic(spec, shape);
  const auto stored = crc::stored_from_synthetic(ds);
  crc::write_dataset(g.out / "dataset", stored);
  spec.to_kv().write(g.out / "dataset" / "synthetic_spec.kv");

  auto m = crc::PipelineManifest::load(g.out);
  auto outputs = prefixed("dataset", crc::dataset_files(stored));
  outputs.push_back("dataset/synthetic_spec.kv");
  record(g, m, "synth", {}, outputs, cfg, timer);
  std::cout << "synth: " << spec.nodes << " nodes, " << ds.split.train.samples() << "/" << ds.split.val.samples()
            << "/" << ds.split.test.samples() << " train/val/test windows -> " << (g.out / "dataset").string() << "\n";
  return kOk;
}

struct IngestArgs {
  std::string csv, spec, timestamp = "date", baseline = "linear", normalization = "zscore";
  std::vector<std::string> columns;
  std::size_t lookback = 96, horizon = 24;
};

int cmd_ingest(const Globals& g, const IngestArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  crc::CsvDatasetSpec spec;
  if (!a.spec.empty()) spec = crc::CsvDatasetSpec::from_kv(crc::KvFile::read(a.spec));
  if (!a.csv.empty()) spec.path = a.csv;
  if (spec.path.empty()) throw crc::ConfigError("ingest needs --csv or a spec with a path");
  if (a.spec.empty()) {
    spec.timestamp_column = a.timestamp;
    spec.value_columns = a.columns;
    if (a.normalization == "none") spec.normalization = crc::NormalizationKind::none;
    else if (a.normalization != "zscore") throw crc::ConfigError("normalization must be zscore or none");
  }
  const auto table = crc::read_csv(spec.path);
  crc::Shape shape;
  shape.lookback = a.lookback;
  shape.horizon = a.horizon;
  shape.nodes = 2;
  shape.validate();
  const auto baseline = crc::BaselineSpec::parse(a.baseline);
  crc::StoredDataset stored;
  stored.split = crc::load_table(table, spec, shape, {}, baseline);
  stored.source = "csv";
  stored.baseline = baseline.name();
  crc::write_dataset(g.out / "dataset", stored);

  auto m = crc::PipelineManifest::load(g.out);
  record(g, m, "ingest", {{"source:" + spec.path.string(), crc::hash_file(spec.path)}},
         prefixed("dataset", crc::dataset_files(stored)), cfg, timer);
  std::cout << "ingest: " << stored.split.nodes() << " series, " << stored.split.train.samples() << "/"
            << stored.split.val.samples() << "/" << stored.split.test.samples() << " windows, baseline "
            << stored.baseline << "\n";
  return kOk;
}

int cmd_graph(const Globals& g) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto inputs = m.verify_inputs(g.out, dataset_inputs(g.out));
  const auto data = crc::read_dataset(g.out / "dataset");
  cfg.validate_for_nodes(data.split.nodes());
  const auto graph = crc::build_correlation_knn(data.split.train_series(), cfg.knn_k);
  crc::write_edge_list(g.out / "graph.csv", graph,
                       "target,source edges of the K-NN correlation graph\nknn_k = " + std::to_string(cfg.knn_k));
  record(g, m, "graph", std::move(inputs), {"graph.csv"}, cfg, timer);
  std::cout << "graph: K = " << cfg.knn_k << " over " << graph.nodes() << " nodes\n";
  return kOk;
}

struct FitArgs {
  std::string features = "encoder", corrector = "hybrid";
};

int cmd_fit(const Globals& g, const FitArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto files = dataset_inputs(g.out);
  files.push_back("graph.csv");
  auto inputs = m.verify_inputs(g.out, files);
  const auto data = crc::read_dataset(g.out / "dataset");
  const auto graph = load_graph(g.out);
  crc::PipelineOptions opt;
  opt.features = crc::parse_feature_mode(a.features);
  opt.corrector = crc::parse_corrector_mode(a.corrector);
  const auto model = crc::fit_corrector(data.split, graph, cfg, opt);
  crc::write_checkpoint(g.out / "checkpoint.json", model);
  record(g, m, "fit", std::move(inputs), {"checkpoint.json"}, cfg, timer);
  std::cout << "fit: encoder " << (model.has_encoder ? std::to_string(model.encoder_trace.size()) + " epochs" : "off")
            << ", ridge " << (model.has_ridge ? "on" : "off") << ", mlp "
            << (model.has_mlp ? std::to_string(model.mlp_trace.size()) + " epochs" : "off") << "\n";
  return kOk;
}

struct CalibrateArgs {
  bool no_gating = false, no_clipping = false, no_selection = false, no_blending = false;
};

int cmd_calibrate(const Globals& g, const CalibrateArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto files = dataset_inputs(g.out);
  files.push_back("graph.csv");
  files.push_back("checkpoint.json");
  auto inputs = m.verify_inputs(g.out, files);
  auto model = crc::read_checkpoint(g.out / "checkpoint.json");
  require_hash("checkpoint.json", model.config_hash, cfg.hash());
  if (a.no_gating) model.options.firewall.gating = false;
  if (a.no_clipping) model.options.firewall.clipping = false;
  if (a.no_selection) model.options.firewall.selection = false;
  if (a.no_blending) model.options.firewall.blending = false;
  const auto data = crc::read_dataset(g.out / "dataset");
  const auto policy = crc::calibrate_corrector(model, data.split.val, load_graph(g.out), cfg);
  policy.write(g.out / "policy.json");
  record(g, m, "calibrate", std::move(inputs), {"policy.json"}, cfg, timer);
  std::cout << "calibrate: " << (policy.active ? "active" : "reverted to base") << ", (w1, w2) = ("
            << crc::format_double(policy.w1) << ", " << crc::format_double(policy.w2)
            << "), validation improvement " << crc::format_double(policy.relative_improvement) << "\n";
  return policy.active ? kOk : kReverted;
}

struct CorrectArgs {
  std::string split = "all";
  std::string base;
};

int cmd_correct(const Globals& g, const CorrectArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto files = dataset_inputs(g.out);
  files.push_back("graph.csv");
  files.push_back("checkpoint.json");
  files.push_back("policy.json");
  auto inputs = m.verify_inputs(g.out, files);
  const auto model = crc::read_checkpoint(g.out / "checkpoint.json");
  const auto policy = crc::SafetyPolicy::read(g.out / "policy.json");
  require_hash("checkpoint.json", model.config_hash, cfg.hash());
  require_hash("policy.json", policy.config_hash, cfg.hash());
  if (!a.base.empty() && a.split == "all") throw crc::ConfigError("--base needs a single --split");
  const auto data = crc::read_dataset(g.out / "dataset");
  const auto graph = load_graph(g.out);
  const std::string policy_hash = crc::hash_file(g.out / "policy.json");

  std::vector<std::string> splits;
  if (a.split == "all") splits = {"val", "test"};
  else splits = {a.split};
  std::vector<std::string> outputs;
  for (const auto& name : splits) {
    const auto& inst = split_of(data.split, name);
    const fs::path base_path = a.base.empty() ? g.out / "dataset" / ("base_" + name + ".csv") : fs::path(a.base);
    const auto base = crc::read_forecast_csv(base_path);
    crc::require_same_shape(base, inst.base_forecast, "base forecast for split " + name);
    const std::string out_name = "corrected_" + name + ".csv";
    if (!policy.active) {
      crc::write_text(g.out / out_name, crc::read_text(base_path));
    } else {
      const auto d = crc::predict_deltas(model, inst.history, graph);
      crc::write_forecast_csv(g.out / out_name, crc::apply_policy(policy, d.ridge, d.mlp, base).corrected);
    }
    crc::KvFile meta;
    meta.set("config_hash", cfg.hash());
    meta.set("policy_hash", policy_hash);
    meta.set("split", name);
    meta.set("base", fs::absolute(base_path).lexically_normal().string());
    meta.set("base_hash", crc::hash_file(base_path));
    meta.set("active", std::string(policy.active ? "true" : "false"));
    meta.write(g.out / (out_name + ".meta"));
    outputs.push_back(out_name);
    outputs.push_back(out_name + ".meta");
    if (!a.base.empty()) inputs["external:" + base_path.string()] = crc::hash_file(base_path);
  }
  // A single-split run keeps the other split's earlier outputs on record.
  if (const auto* prev = m.find("correct")) {
    for (const auto& [path, hash] : prev->outputs)
      if (std::find(outputs.begin(), outputs.end(), path) == outputs.end() && fs::exists(g.out / path) &&
          crc::hash_file(g.out / path) == hash)
        outputs.push_back(path);
  }
  record(g, m, "correct", std::move(inputs), outputs, cfg, timer);
  std::cout << "correct: " << (policy.active ? "corrected" : "reverted; copied base for") << " "
            << splits.size() << " split(s)\n";
  return policy.active ? kOk : kReverted;
}

int cmd_evaluate(const Globals& g) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  std::vector<std::string> files = dataset_inputs(g.out);
  std::vector<std::string> present;
  for (const char* name : kSplitNames) {
    const std::string f = std::string("corrected_") + name + ".csv";
    if (fs::exists(g.out / f)) {
      files.push_back(f);
      files.push_back(f + ".meta");
      present.push_back(name);
    }
  }
  if (present.empty()) throw crc::MissingStage("no corrected forecasts; run correct first");
  auto inputs = m.verify_inputs(g.out, files);
  const auto data = crc::read_dataset(g.out / "dataset");
  std::vector<std::string> outputs;
  for (const auto& name : present) {
    const auto meta = crc::KvFile::read(g.out / ("corrected_" + name + ".csv.meta"));
    require_hash("corrected_" + name + ".csv", meta.get("config_hash"), cfg.hash());
    const fs::path base_path = meta.get("base");
    if (crc::hash_file(base_path) != meta.get("base_hash"))
      throw crc::StaleInput(base_path.string() + " changed since correct ran");
    const auto base = crc::read_forecast_csv(base_path);
    const auto corrected = crc::read_forecast_csv(g.out / ("corrected_" + name + ".csv"));
    auto report = crc::evaluate(name, base, corrected, split_of(data.split, name).target_or_throw());
    // Wall-clock lives in the manifest so reruns stay byte-identical.
    report.config_hash = cfg.hash();
    report.write(g.out / ("report_" + name + ".json"));
    crc::write_text(g.out / ("pairs_" + name + ".csv"), report.pairs_csv());
    outputs.push_back("report_" + name + ".json");
    outputs.push_back("pairs_" + name + ".csv");
    std::cout << "evaluate " << name << ": MAE " << crc::format_double(report.mae_base) << " -> "
              << crc::format_double(report.mae_corrected) << ", MSE " << crc::format_double(report.mse_base) << " -> "
              << crc::format_double(report.mse_corrected) << ", NDR " << crc::format_double(report.ndr) << "\n";
  }
  record(g, m, "evaluate", std::move(inputs), outputs, cfg, timer);
  return kOk;
}

struct CertifyArgs {
  bool error_bound = false;
};

int cmd_certify(const Globals& g, const CertifyArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto inputs = m.verify_inputs(g.out, {"policy.json", "report_val.json", "report_test.json"});
  const auto policy = crc::SafetyPolicy::read(g.out / "policy.json");
  const auto val = crc::EvaluationReport::read(g.out / "report_val.json");
  const auto test = crc::EvaluationReport::read(g.out / "report_test.json");
  if (policy.config_hash != val.config_hash || policy.config_hash != test.config_hash)
    throw crc::StaleInput("policy and reports carry different config hashes (" + policy.config_hash + ", " +
                          val.config_hash + ", " + test.config_hash + ")");
  require_hash("policy.json", policy.config_hash, cfg.hash());
  const auto cert = crc::certify(policy, val.pair_mae_base, val.pair_mae_corrected, test.pair_mae_base,
                                 test.pair_mae_corrected, cfg.confidence, a.error_bound);
  cert.write(g.out / "certificate.json");
  record(g, m, "certify", std::move(inputs), {"certificate.json"}, cfg, timer);
  std::cout << "certify: m = " << cert.m << ", NDR val " << crc::format_double(cert.ndr_val) << ", NDR test "
            << crc::format_double(cert.ndr_test) << ", lower bound " << crc::format_double(cert.pand_bound)
            << " at confidence " << crc::format_double(cert.confidence) << "\n";
  return policy.active ? kOk : kReverted;
}

struct InfluenceArgs {
  std::string split = "test";
  std::vector<std::size_t> times{0};
};

int cmd_influence(const Globals& g, const InfluenceArgs& a) {
  StageTimer timer;
  const auto cfg = resolve_config(g);
  auto m = crc::PipelineManifest::load(g.out);
  auto files = dataset_inputs(g.out);
  files.push_back("graph.csv");
  files.push_back("checkpoint.json");
  auto inputs = m.verify_inputs(g.out, files);
  const auto model = crc::read_checkpoint(g.out / "checkpoint.json");
  if (!model.has_encoder) throw crc::MissingStage("checkpoint has no encoder (fitted with --features priors)");
  const auto data = crc::read_dataset(g.out / "dataset");
  const auto graph = crc::feature_graph(load_graph(g.out), model.options.features);
  const auto& inst = split_of(data.split, a.split);
  fs::create_directories(g.out / "influence");
  std::vector<std::string> outputs;
  for (std::size_t t : a.times) {
    if (t >= inst.samples()) throw crc::ConfigError("time " + std::to_string(t) + " outside split " + a.split);
    const auto s = crc::influence_snapshot(model.encoder, inst.history.slice(t, 1), graph);
    const std::string name = "influence/" + a.split + "_" + std::to_string(t) + ".csv";
    std::vector<std::string> header;
    for (std::size_t j = 0; j < graph.nodes(); ++j) header.push_back("source_" + std::to_string(j));
    crc::write_matrix_csv(g.out / name, s, header);
    outputs.push_back(name);
  }
  record(g, m, "influence", std::move(inputs), outputs, cfg, timer);
  std::cout << "influence: wrote " << outputs.size() << " snapshot(s) to " << (g.out / "influence").string() << "\n";
  return kOk;
}

int worst(int a, int b) { return std::max(a, b); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe residual correction of multivariate forecasts"};
  app.require_subcommand(1);
  Globals g;
  std::string out = g.out.string();
  const auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--out,-o", out, "Workspace directory")->capture_default_str();
    sub->add_option("--config", g.config_path, "Run configuration (key = value file)");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { g.ov.seed = v; }, "Root seed");
    sub->add_option_function<double>("--quantile-q", [&](double v) { g.ov.quantile_q = v; }, "Clip quantile Q");
    sub->add_option_function<double>("--epsilon", [&](double v) { g.ov.epsilon = v; }, "Blend activation threshold");
    sub->add_option_function<std::size_t>("--knn-k", [&](std::size_t v) { g.ov.knn_k = v; }, "Neighbors per node");
    sub->add_option_function<double>("--ridge-lambda", [&](double v) { g.ov.ridge_lambda = v; },
                                     "Fixed ridge penalty (disables the per-node grid)");
    sub->add_option_function<double>("--confidence", [&](double v) { g.ov.confidence = v; },
                                     "Certificate confidence delta");
  };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic dataset with oracle decomposition");
  add_globals(s_synth);
  s_synth->add_option("--spec", synth.spec, "Generator spec file; random stable spec when omitted");
  s_synth->add_option("--nodes", synth.nodes)->capture_default_str();
  s_synth->add_option("--length", synth.length)->capture_default_str();
  s_synth->add_option("--lookback", synth.lookback)->capture_default_str();
  s_synth->add_option("--horizon", synth.horizon)->capture_default_str();
  s_synth->add_option("--noise", synth.noise, "gaussian or student_t")->capture_default_str();
  s_synth->add_option("--sigma", synth.sigma, "Noise scale")->capture_default_str();
  s_synth->add_option("--quadratic", synth.quadratic, "Quadratic cross-term strength")->capture_default_str();
  s_synth->add_option("--cross-strength", synth.cross_strength)->capture_default_str();

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Window a CSV table of series");
  add_globals(s_ingest);
  s_ingest->add_option("--csv", ingest.csv, "Input table");
  s_ingest->add_option("--spec", ingest.spec, "Dataset spec file");
  s_ingest->add_option("--timestamp-column", ingest.timestamp)->capture_default_str();
  s_ingest->add_option("--columns", ingest.columns, "Value columns (default: all but the timestamp)");
  s_ingest->add_option("--normalization", ingest.normalization, "zscore or none")->capture_default_str();
  s_ingest->add_option("--baseline", ingest.baseline, "linear, persistence or seasonal:<period>")->capture_default_str();
  s_ingest->add_option("--lookback", ingest.lookback)->capture_default_str();
  s_ingest->add_option("--horizon", ingest.horizon)->capture_default_str();

  auto* s_graph = app.add_subcommand("graph", "Build the K-NN correlation graph on training rows");
  add_globals(s_graph);

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "Pretrain the encoder, fit the ridge floor and the MLP delta");
  add_globals(s_fit);
  s_fit->add_option("--features", fit.features, "encoder, self_only or priors")->capture_default_str();
  s_fit->add_option("--corrector", fit.corrector, "hybrid, ridge_only or mlp_only")->capture_default_str();

  CalibrateArgs cal;
  auto* s_cal = app.add_subcommand("calibrate", "Calibrate and freeze the safety firewall on validation");
  add_globals(s_cal);
  s_cal->add_flag("--no-gating", cal.no_gating);
  s_cal->add_flag("--no-clipping", cal.no_clipping);
  s_cal->add_flag("--no-selection", cal.no_selection);
  s_cal->add_flag("--no-blending", cal.no_blending);

  CorrectArgs cor;
  auto* s_cor = app.add_subcommand("correct", "Apply the frozen policy to base forecasts");
  add_globals(s_cor);
  s_cor->add_option("--split", cor.split, "val, test or all")->capture_default_str();
  s_cor->add_option("--base", cor.base, "External base forecast CSV (sample,horizon,node,value)");

  auto* s_eval = app.add_subcommand("evaluate", "Score corrected forecasts against targets");
  add_globals(s_eval);

  CertifyArgs cert;
  auto* s_cert = app.add_subcommand("certify", "Emit the non-degradation certificate");
  add_globals(s_cert);
  s_cert->add_flag("--error-bound", cert.error_bound, "Store the empirical per-pair MAE maximum");

  InfluenceArgs inf;
  auto* s_inf = app.add_subcommand("influence", "Export gate-magnitude influence matrices");
  add_globals(s_inf);
  s_inf->add_option("--split", inf.split)->capture_default_str();
  s_inf->add_option("--times", inf.times, "Window indices within the split")->delimiter(',');

  FitArgs run_fit;
  auto* s_run = app.add_subcommand("run", "graph, fit, calibrate, correct, evaluate and certify in sequence");
  add_globals(s_run);
  s_run->add_option("--features", run_fit.features)->capture_default_str();
  s_run->add_option("--corrector", run_fit.corrector)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  g.out = out;

  try {
    if (s_synth->parsed()) return cmd_synth(g, synth);
    if (s_ingest->parsed()) return cmd_ingest(g, ingest);
    if (s_graph->parsed()) return cmd_graph(g);
    if (s_fit->parsed()) return cmd_fit(g, fit);
    if (s_cal->parsed()) return cmd_calibrate(g, cal);
    if (s_cor->parsed()) return cmd_correct(g, cor);
    if (s_eval->parsed()) return cmd_evaluate(g);
    if (s_cert->parsed()) return cmd_certify(g, cert);
    if (s_inf->parsed()) return cmd_influence(g, inf);
    if (s_run->parsed()) {
      int code = cmd_graph(g);
      code = worst(code, cmd_fit(g, run_fit));
      code = worst(code, cmd_calibrate(g, {}));
      code = worst(code, cmd_correct(g, {}));
      code = worst(code, cmd_evaluate(g));
      return worst(code, cmd_certify(g, {}));
    }
  } catch (const crc::ConfigError& e) {
    std::cerr << "crc: " << e.what() << "\n";
    return kBadInput;
  } catch (const crc::ParseError& e) {
    std::cerr << "crc: " << e.what() << "\n";
    return kBadInput;
  } catch (const crc::StaleInput& e) {
    std::cerr << "crc: " << e.what() << "\n";
    return kStale;
  } catch (const crc::MissingStage& e) {
    std::cerr << "crc: " << e.what() << "\n";
    return kStale;
  } catch (const crc::Error& e) {
    std::cerr << "crc: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "crc: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
