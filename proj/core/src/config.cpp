#include "crc/config.hpp"

#include <set>
#include <sstream>

#include "crc/error.hpp"
#include "crc/hash.hpp"

namespace crc {

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s, const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, context));
  return out;
}

std::size_t as_count(const KvFile& kv, const std::string& key) {
  const long long v = kv.get_int(key);
  if (v < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

void RunConfig::validate() const {
  if (!(quantile_q > 0.0 && quantile_q <= 1.0)) throw ConfigError("quantile_q must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be >= 0");
  for (double l : ridge_lambda_grid)
    if (!(l >= 0.0)) throw ConfigError("ridge_lambda_grid entries must be >= 0");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
  if (!(gate_margin >= 0.0 && gate_margin < 0.5)) throw ConfigError("gate_margin must lie in [0, 0.5)");
  if (knn_k == 0) throw ConfigError("knn_k must be positive");
  if (latent_dim == 0 || mlp_hidden == 0) throw ConfigError("layer widths must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(encoder_lr > 0.0) || !(mlp_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(encoder_weight_decay >= 0.0)) throw ConfigError("encoder_weight_decay must be >= 0");
}

void RunConfig::validate_for_nodes(std::size_t nodes) const {
  validate();
  if (nodes >= 2 && knn_k >= nodes) {
    throw ConfigError("knn_k = " + std::to_string(knn_k) + " must be < N = " + std::to_string(nodes));
  }
}

KvFile RunConfig::to_kv() const {
  KvFile kv;
  kv.set_int("knn_k", static_cast<long long>(knn_k));
  kv.set("quantile_q", quantile_q);
  kv.set("epsilon", epsilon);
  kv.set("gate_margin", gate_margin);
  kv.set("confidence", confidence);
  kv.set("ridge_lambda", ridge_lambda);
  kv.set("ridge_lambda_grid", join_doubles(ridge_lambda_grid));
  kv.set_int("latent_dim", static_cast<long long>(latent_dim));
  kv.set("encoder_lr", encoder_lr);
  kv.set("encoder_weight_decay", encoder_weight_decay);
  kv.set_int("encoder_epochs", static_cast<long long>(encoder_epochs));
  kv.set_int("mlp_hidden", static_cast<long long>(mlp_hidden));
  kv.set_int("node_embedding_dim", static_cast<long long>(node_embedding_dim));
  kv.set("mlp_lr", mlp_lr);
  kv.set_int("mlp_epochs", static_cast<long long>(mlp_epochs));
  kv.set_int("batch_size", static_cast<long long>(batch_size));
  kv.set_int("patience", static_cast<long long>(patience));
  kv.set("seed", std::to_string(seed));
  return kv;
}

RunConfig RunConfig::from_kv(const KvFile& kv) {
  static const std::set<std::string> keys = {
      "knn_k",       "quantile_q",   "epsilon",           "gate_margin",
      "confidence",  "ridge_lambda", "ridge_lambda_grid", "latent_dim",
      "encoder_lr",  "encoder_weight_decay", "encoder_epochs", "mlp_hidden",
      "node_embedding_dim", "mlp_lr", "mlp_epochs",       "batch_size",
      "patience",    "seed"};
  kv.require_known_keys(keys);
  RunConfig c;
  if (kv.contains("knn_k")) c.knn_k = as_count(kv, "knn_k");
  if (kv.contains("quantile_q")) c.quantile_q = kv.get_double("quantile_q");
  if (kv.contains("epsilon")) c.epsilon = kv.get_double("epsilon");
  if (kv.contains("gate_margin")) c.gate_margin = kv.get_double("gate_margin");
  if (kv.contains("confidence")) c.confidence = kv.get_double("confidence");
  if (kv.contains("ridge_lambda")) c.ridge_lambda = kv.get_double("ridge_lambda");
  if (kv.contains("ridge_lambda_grid"))
    c.ridge_lambda_grid = split_doubles(kv.get("ridge_lambda_grid"), "ridge_lambda_grid");
  if (kv.contains("latent_dim")) c.latent_dim = as_count(kv, "latent_dim");
  if (kv.contains("encoder_lr")) c.encoder_lr = kv.get_double("encoder_lr");
  if (kv.contains("encoder_weight_decay")) c.encoder_weight_decay = kv.get_double("encoder_weight_decay");
  if (kv.contains("encoder_epochs")) c.encoder_epochs = as_count(kv, "encoder_epochs");
  if (kv.contains("mlp_hidden")) c.mlp_hidden = as_count(kv, "mlp_hidden");
  if (kv.contains("node_embedding_dim")) c.node_embedding_dim = as_count(kv, "node_embedding_dim");
  if (kv.contains("mlp_lr")) c.mlp_lr = kv.get_double("mlp_lr");
  if (kv.contains("mlp_epochs")) c.mlp_epochs = as_count(kv, "mlp_epochs");
  if (kv.contains("batch_size")) c.batch_size = as_count(kv, "batch_size");
  if (kv.contains("patience")) c.patience = as_count(kv, "patience");
  if (kv.contains("seed")) c.seed = kv.get_uint("seed");
  c.validate();
  return c;
}

RunConfig RunConfig::read(const std::filesystem::path& path) { return from_kv(KvFile::read(path)); }

void RunConfig::write(const std::filesystem::path& path) const { to_kv().write(path); }

std::string RunConfig::hash() const { return hash_hex(to_kv().to_string()); }

}  // namespace crc
