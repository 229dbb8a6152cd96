#include "crc/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crc/error.hpp"

namespace crc {

namespace {

using B = MlpModel::Block;

constexpr double kScaleFloor = 1e-8;

void check_shapes(const MlpModel& m, const Tensor3& features) {
  if (features.dim(1) != m.nodes() || features.dim(2) != m.features())
    throw ShapeMismatch("MLP expects [B x " + std::to_string(m.nodes()) + " x " + std::to_string(m.features()) +
                        "] features, got " + features.shape_string());
}

// Input columns [x; e_i] for every node of sample b: [(D + e) x N].
Matrix sample_inputs(const MlpModel& m, const Tensor3& features, std::size_t b) {
  const std::size_t N = m.nodes(), D = m.features(), E = m.embedding_dim();
  Matrix x(static_cast<Eigen::Index>(D + E), static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < D; ++k)
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          (features(b, i, k) - m.input_mean[k]) / m.input_scale[k];
  x.bottomRows(static_cast<Eigen::Index>(E)) = m.weights.mat(B::embedding);
  return x;
}

double val_mae(const MlpModel& m, const Tensor3& features, const Tensor3& target) {
  const Tensor3 pred = predict_mlp(m, features);
  double s = 0.0;
  const auto p = pred.values();
  const auto t = target.values();
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - t[k]);
  return s / static_cast<double>(p.size());
}

}  // namespace

MlpModel::MlpModel(std::size_t features, std::size_t nodes, std::size_t horizon, std::size_t hidden,
                   std::size_t embedding_dim)
    : input_mean(features, 0.0),
      input_scale(features, 1.0),
      features_(features),
      nodes_(nodes),
      horizon_(horizon),
      hidden_(hidden),
      embedding_dim_(embedding_dim) {
  if (features == 0 || nodes == 0 || horizon == 0 || hidden == 0) throw ConfigError("MLP sizes must be positive");
  const auto E = static_cast<Eigen::Index>(embedding_dim), Hd = static_cast<Eigen::Index>(hidden);
  weights.add("embedding", E, static_cast<Eigen::Index>(nodes));
  weights.add("w1", Hd, static_cast<Eigen::Index>(features) + E);
  weights.add("b1", Hd, 1);
  weights.add("w2", static_cast<Eigen::Index>(horizon), Hd);
  weights.add("b2", static_cast<Eigen::Index>(horizon), 1);
}

MlpModel MlpModel::initialized(std::size_t features, std::size_t nodes, std::size_t horizon, std::size_t hidden,
                               std::size_t embedding_dim, Rng& rng) {
  MlpModel m(features, nodes, horizon, hidden, embedding_dim);
  m.weights.randomize(B::embedding, 1.0, rng);
  m.weights.randomize(B::w1, 1.0 / std::sqrt(static_cast<double>(features + embedding_dim)), rng);
  return m;
}

void MlpModel::fit_input_scaling(const Tensor3& features) {
  if (features.dim(2) != features_) throw ShapeMismatch("feature width differs from MLP input");
  const std::size_t rows = features.dim(0) * features.dim(1);
  if (rows == 0) return;
  const auto v = features.values();
  for (std::size_t k = 0; k < features_; ++k) {
    double m = 0.0;
    for (std::size_t r = 0; r < rows; ++r) m += v[r * features_ + k];
    m /= static_cast<double>(rows);
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += (v[r * features_ + k] - m) * (v[r * features_ + k] - m);
    const double sd = std::sqrt(s / static_cast<double>(rows));
    input_mean[k] = m;
    input_scale[k] = sd < kScaleFloor ? 1.0 : sd;
  }
}

Tensor3 predict_mlp(const MlpModel& model, const Tensor3& features) {
  check_shapes(model, features);
  const std::size_t Bn = features.dim(0), N = model.nodes(), H = model.horizon();
  Tensor3 out(Bn, H, N);
  const auto w1 = model.weights.mat(B::w1);
  const auto b1 = model.weights.mat(B::b1);
  const auto w2 = model.weights.mat(B::w2);
  const auto b2 = model.weights.mat(B::b2);
  for (std::size_t b = 0; b < Bn; ++b) {
    const Matrix x = sample_inputs(model, features, b);
    const Matrix hid = ((w1 * x).colwise() + b1.col(0)).array().tanh().matrix();
    const Matrix y = (w2 * hid).colwise() + b2.col(0);
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t i = 0; i < N; ++i) out(b, h, i) = y(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(i));
  }
  return out;
}

double mlp_objective(const MlpModel& model, const Tensor3& features, const Tensor3& target,
                     std::span<const std::size_t> index, ParamSet* grad) {
  check_shapes(model, features);
  const std::size_t N = model.nodes(), H = model.horizon();
  if (target.dim(1) != H || target.dim(2) != N || target.dim(0) != features.dim(0))
    throw ShapeMismatch("MLP target shape " + target.shape_string());
  if (index.empty()) throw ShapeMismatch("MLP objective over an empty batch");
  const auto w1 = model.weights.mat(B::w1);
  const auto b1 = model.weights.mat(B::b1);
  const auto w2 = model.weights.mat(B::w2);
  const auto b2 = model.weights.mat(B::b2);
  if (grad) *grad = model.weights.zeros_like();
  const double count = static_cast<double>(index.size() * N * H);
  Matrix t(static_cast<Eigen::Index>(H), static_cast<Eigen::Index>(N));
  double sse = 0.0;
  for (std::size_t b : index) {
    const Matrix x = sample_inputs(model, features, b);
    const Matrix hid = ((w1 * x).colwise() + b1.col(0)).array().tanh().matrix();
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t i = 0; i < N; ++i) t(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(i)) = target(b, h, i);
    const Matrix diff = ((w2 * hid).colwise() + b2.col(0)) - t;
    sse += diff.squaredNorm();
    if (!grad) continue;
    const Matrix dy = diff * (2.0 / count);
    grad->mat(B::w2) += dy * hid.transpose();
    grad->mat(B::b2) += dy.rowwise().sum();
    const Matrix da = (w2.transpose() * dy).cwiseProduct((1.0 - hid.array().square()).matrix());
    grad->mat(B::w1) += da * x.transpose();
    grad->mat(B::b1) += da.rowwise().sum();
    grad->mat(B::embedding) += (w1.transpose() * da).bottomRows(static_cast<Eigen::Index>(model.embedding_dim()));
  }
  return sse / count;
}

MlpTrainingResult fit_mlp(const MlpModel& init, const Tensor3& train_features, const Tensor3& train_target,
                          const Tensor3& val_features, const Tensor3& val_target, const RunConfig& config) {
  if (val_features.dim(0) == 0) throw EmptyValidation("MLP early stopping needs validation windows");
  if (train_features.dim(0) == 0) throw InsufficientRows("no training windows");
  require_same_shape(val_target, predict_mlp(init, val_features), "MLP validation target");
  MlpTrainingResult result;
  MlpModel model = init;
  AdamOptimizer opt(model.weights.size(), config.mlp_lr);
  Rng rng = make_rng(config.seed, "mlp_batches");
  std::vector<std::size_t> order(train_features.dim(0));
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  double best = std::numeric_limits<double>::infinity();
  MlpModel best_model = model;
  std::size_t stale = 0;
  ParamSet grad;
  for (std::size_t epoch = 0; epoch < config.mlp_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += batch) {
      const std::size_t count = std::min(batch, order.size() - first);
      const double loss = mlp_objective(model, train_features, train_target,
                                        std::span<const std::size_t>(order.data() + first, count), &grad);
      if (!std::isfinite(loss))
        throw NonFiniteLoss("MLP epoch " + std::to_string(epoch) + " batch " + std::to_string(first / batch));
      loss_sum += loss * static_cast<double>(count);
      opt.step(model.weights.values(), grad.values());
    }
    const double mae = val_mae(model, val_features, val_target);
    result.trace.push_back({loss_sum / static_cast<double>(order.size()), mae});
    if (!std::isfinite(mae)) throw NonFiniteLoss("MLP validation MAE diverged at epoch " + std::to_string(epoch));
    if (mae < best) {
      best = mae;
      best_model = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.model = std::move(best_model);
  return result;
}

MlpTrainingResult fit_mlp(const Tensor3& train_features, const Tensor3& train_target, const Tensor3& val_features,
                          const Tensor3& val_target, const RunConfig& config) {
  Rng rng = make_rng(config.seed, "mlp_init");
  MlpModel init = MlpModel::initialized(train_features.dim(2), train_features.dim(1), train_target.dim(1),
                                        config.mlp_hidden, config.node_embedding_dim, rng);
  init.fit_input_scaling(train_features);
  return fit_mlp(init, train_features, train_target, val_features, val_target, config);
}

}  // namespace crc
