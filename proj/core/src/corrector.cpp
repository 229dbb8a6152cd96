#include "crc/corrector.hpp"

#include "crc/csv.hpp"
#include "crc/error.hpp"
#include "crc/priors.hpp"
#include "json_util.hpp"

namespace crc {

namespace {

using json_util::Json;

Json params_to_json(const ParamSet& p) {
  Json blocks = Json::array();
  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    const auto& b = p.blocks()[k];
    const auto m = p.mat(k);
    Json j;
    j["name"] = b.name;
    j["rows"] = b.rows;
    j["cols"] = b.cols;
    j["values"] = std::vector<double>(m.data(), m.data() + m.size());
    blocks.push_back(std::move(j));
  }
  return blocks;
}

// Fills `p` (layout already built) from serialized blocks.
void params_from_json(const Json& j, ParamSet& p, const std::string& what) {
  if (!j.is_array() || j.size() != p.blocks().size()) throw ParseError(what + ": block count mismatch");
  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    const auto& b = p.blocks()[k];
    const auto& jb = j[k];
    if (jb.at("name").get<std::string>() != b.name || jb.at("rows").get<Eigen::Index>() != b.rows ||
        jb.at("cols").get<Eigen::Index>() != b.cols)
      throw ParseError(what + ": block " + b.name + " layout mismatch");
    const auto values = jb.at("values").get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(b.rows * b.cols)) throw ParseError(what + ": block " + b.name + " size");
    auto m = p.mat(k);
    std::copy(values.begin(), values.end(), m.data());
  }
}

Tensor3 zeros_for(const Tensor3& history, std::size_t horizon) {
  return Tensor3(history.dim(0), horizon, history.dim(2));
}

std::size_t model_horizon(const FittedCorrector& m) {
  if (m.has_ridge) return m.ridge.horizon();
  if (m.has_mlp) return m.mlp.horizon();
  return 0;
}

}  // namespace

PipelineOptions PipelineOptions::unconstrained_mlp() {
  PipelineOptions o;
  o.corrector = CorrectorMode::mlp_only;
  o.firewall = {false, false, false, false};
  return o;
}

std::string to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::encoder: return "encoder";
    case FeatureMode::self_only: return "self_only";
    case FeatureMode::priors: return "priors";
  }
  return "encoder";
}

std::string to_string(CorrectorMode m) {
  switch (m) {
    case CorrectorMode::hybrid: return "hybrid";
    case CorrectorMode::ridge_only: return "ridge_only";
    case CorrectorMode::mlp_only: return "mlp_only";
  }
  return "hybrid";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "encoder") return FeatureMode::encoder;
  if (text == "self_only") return FeatureMode::self_only;
  if (text == "priors") return FeatureMode::priors;
  throw ConfigError("unknown feature mode '" + std::string(text) + "'");
}

CorrectorMode parse_corrector_mode(std::string_view text) {
  if (text == "hybrid") return CorrectorMode::hybrid;
  if (text == "ridge_only") return CorrectorMode::ridge_only;
  if (text == "mlp_only") return CorrectorMode::mlp_only;
  throw ConfigError("unknown corrector mode '" + std::string(text) + "'");
}

AdjacencyGraph feature_graph(const AdjacencyGraph& graph, FeatureMode mode) {
  if (mode != FeatureMode::self_only) return graph;
  return AdjacencyGraph::from_neighbors(std::vector<std::vector<std::size_t>>(graph.nodes()));
}

Tensor3 corrector_features(const FittedCorrector& model, const Tensor3& history, const AdjacencyGraph& graph) {
  const AdjacencyGraph g = feature_graph(graph, model.options.features);
  const FeaturePriors priors = compute_priors(history, g);
  if (model.has_encoder) return encode(model.encoder, history, g, priors).z_aug;
  const std::size_t Bn = history.dim(0), N = history.dim(2), q = priors.own.dim(2);
  Tensor3 out(Bn, N, 2 * q);
  for (std::size_t b = 0; b < Bn; ++b)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < q; ++k) {
        out(b, i, k) = priors.own(b, i, k);
        out(b, i, q + k) = priors.aggregated(b, i, k);
      }
  return out;
}

FittedCorrector fit_corrector(const DatasetSplit& split, const AdjacencyGraph& graph, const RunConfig& config,
                              const PipelineOptions& options) {
  config.validate();
  if (graph.nodes() != split.nodes()) throw ShapeMismatch("graph node count differs from dataset");
  FittedCorrector m;
  m.options = options;
  m.config_hash = config.hash();

  if (options.features != FeatureMode::priors) {
    auto trained = train_encoder(split.train, split.val, feature_graph(graph, options.features), config);
    m.has_encoder = true;
    m.encoder = std::move(trained.params);
    m.encoder_trace = std::move(trained.trace);
  }
  const Tensor3 f_train = corrector_features(m, split.train.history, graph);
  const Tensor3 f_val = corrector_features(m, split.val.history, graph);
  const Tensor3 r_train = compute_residuals(split.train).raw;
  const Tensor3 r_val = compute_residuals(split.val).raw;

  Tensor3 e_train = r_train, e_val = r_val;
  if (options.corrector != CorrectorMode::mlp_only) {
    m.ridge = config.ridge_lambda_grid.empty()
                  ? fit_ridge(f_train, r_train, config.ridge_lambda)
                  : fit_ridge_select(f_train, r_train, f_val, r_val, config.ridge_lambda_grid);
    m.has_ridge = true;
    e_train = r_train - predict_ridge(m.ridge, f_train);
    e_val = r_val - predict_ridge(m.ridge, f_val);
  }
  if (options.corrector != CorrectorMode::ridge_only) {
    auto trained = fit_mlp(f_train, e_train, f_val, e_val, config);
    m.has_mlp = true;
    m.mlp = std::move(trained.model);
    m.mlp_trace = std::move(trained.trace);
  }
  return m;
}

CorrectionDeltas predict_deltas(const FittedCorrector& model, const Tensor3& history, const AdjacencyGraph& graph) {
  const std::size_t H = model_horizon(model);
  if (H == 0) throw MissingStage("corrector has neither ridge nor MLP component");
  const Tensor3 f = corrector_features(model, history, graph);
  CorrectionDeltas d;
  d.ridge = model.has_ridge ? predict_ridge(model.ridge, f) : zeros_for(history, H);
  d.mlp = model.has_mlp ? predict_mlp(model.mlp, f) : zeros_for(history, H);
  return d;
}

std::string checkpoint_to_json(const FittedCorrector& m) {
  Json j;
  j["format"] = "crc-checkpoint";
  j["version"] = 1;
  j["config_hash"] = m.config_hash;
  j["features"] = to_string(m.options.features);
  j["corrector"] = to_string(m.options.corrector);
  j["firewall"] = {{"gating", m.options.firewall.gating},
                   {"clipping", m.options.firewall.clipping},
                   {"selection", m.options.firewall.selection},
                   {"blending", m.options.firewall.blending}};
  if (m.has_encoder) {
    Json e;
    e["lookback"] = m.encoder.lookback();
    e["latent"] = m.encoder.latent();
    e["input_mean"] = m.encoder.input_mean;
    e["input_scale"] = m.encoder.input_scale;
    e["self_const"] = m.encoder.self_const;
    e["blocks"] = params_to_json(m.encoder.weights);
    Json trace = Json::array();
    for (const auto& t : m.encoder_trace) trace.push_back({t.train_loss, t.val_mae});
    e["trace"] = std::move(trace);
    j["encoder"] = std::move(e);
  }
  if (m.has_ridge) {
    Json r;
    r["lambda"] = m.ridge.lambda;
    Json w = Json::array();
    for (const auto& wi : m.ridge.weights) w.push_back(json_util::matrix_to_json(wi));
    r["weights"] = std::move(w);
    j["ridge"] = std::move(r);
  }
  if (m.has_mlp) {
    Json p;
    p["features"] = m.mlp.features();
    p["nodes"] = m.mlp.nodes();
    p["horizon"] = m.mlp.horizon();
    p["hidden"] = m.mlp.hidden();
    p["embedding_dim"] = m.mlp.embedding_dim();
    p["input_mean"] = m.mlp.input_mean;
    p["input_scale"] = m.mlp.input_scale;
    p["blocks"] = params_to_json(m.mlp.weights);
    Json trace = Json::array();
    for (const auto& t : m.mlp_trace) trace.push_back({t.train_loss, t.val_mae});
    p["trace"] = std::move(trace);
    j["mlp"] = std::move(p);
  }
  return j.dump(1) + "\n";
}

FittedCorrector checkpoint_from_json(std::string_view text) {
  const Json j = json_util::parse(text, "crc-checkpoint");
  FittedCorrector m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.options.features = parse_feature_mode(j.at("features").get<std::string>());
    m.options.corrector = parse_corrector_mode(j.at("corrector").get<std::string>());
    const auto& fw = j.at("firewall");
    m.options.firewall = {fw.at("gating").get<bool>(), fw.at("clipping").get<bool>(),
                          fw.at("selection").get<bool>(), fw.at("blending").get<bool>()};
    if (j.contains("encoder")) {
      const auto& e = j["encoder"];
      m.encoder = EncoderParams(e.at("lookback").get<std::size_t>(), e.at("latent").get<std::size_t>());
      m.encoder.input_mean = e.at("input_mean").get<double>();
      m.encoder.input_scale = e.at("input_scale").get<double>();
      m.encoder.self_const = e.at("self_const").get<double>();
      params_from_json(e.at("blocks"), m.encoder.weights, "encoder");
      for (const auto& t : e.at("trace")) m.encoder_trace.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
      m.has_encoder = true;
    }
    if (j.contains("ridge")) {
      const auto& r = j["ridge"];
      m.ridge.lambda = r.at("lambda").get<std::vector<double>>();
      for (const auto& w : r.at("weights")) m.ridge.weights.push_back(json_util::matrix_from_json(w));
      if (m.ridge.lambda.size() != m.ridge.weights.size()) throw ParseError("checkpoint: ridge lambda count");
      m.has_ridge = true;
    }
    if (j.contains("mlp")) {
      const auto& p = j["mlp"];
      m.mlp = MlpModel(p.at("features").get<std::size_t>(), p.at("nodes").get<std::size_t>(),
                       p.at("horizon").get<std::size_t>(), p.at("hidden").get<std::size_t>(),
                       p.at("embedding_dim").get<std::size_t>());
      m.mlp.input_mean = p.at("input_mean").get<std::vector<double>>();
      m.mlp.input_scale = p.at("input_scale").get<std::vector<double>>();
      if (m.mlp.input_mean.size() != m.mlp.features() || m.mlp.input_scale.size() != m.mlp.features())
        throw ParseError("checkpoint: MLP input scaling width");
      params_from_json(p.at("blocks"), m.mlp.weights, "mlp");
      for (const auto& t : p.at("trace")) m.mlp_trace.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
      m.has_mlp = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  return m;
}

void write_checkpoint(const std::filesystem::path& path, const FittedCorrector& model) {
  write_text(path, checkpoint_to_json(model));
}

FittedCorrector read_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_text(path)); }

}  // namespace crc
