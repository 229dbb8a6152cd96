#include "crc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "crc/error.hpp"
#include "crc/kvfile.hpp"

namespace crc {

namespace {

using B = EncoderParams::Block;

constexpr double kScaleFloor = 1e-8;
constexpr std::size_t kEncodeChunk = 64;

struct SummaryCache {
  Matrix x, h0, t1, h1, t2, u;
};

Matrix tanh_of(const Matrix& m) { return m.array().tanh().matrix(); }

void summarize_cached(const EncoderParams& p, Matrix x, SummaryCache& c) {
  const auto& w = p.weights;
  c.x = std::move(x);
  c.h0 = (w.mat(B::proj_w) * c.x).colwise() + w.mat(B::proj_b).col(0);
  c.t1 = tanh_of((w.mat(B::res1_wa) * c.h0).colwise() + w.mat(B::res1_ba).col(0));
  c.h1 = c.h0 + ((w.mat(B::res1_wb) * c.t1).colwise() + w.mat(B::res1_bb).col(0));
  c.t2 = tanh_of((w.mat(B::res2_wa) * c.h1).colwise() + w.mat(B::res2_ba).col(0));
  c.u = c.h1 + ((w.mat(B::res2_wb) * c.t2).colwise() + w.mat(B::res2_bb).col(0));
}

void summarize_backward(const EncoderParams& p, const SummaryCache& c, const Matrix& du, ParamSet& g) {
  const auto& w = p.weights;
  g.mat(B::res2_wb) += du * c.t2.transpose();
  g.mat(B::res2_bb) += du.rowwise().sum();
  const Matrix da2 = (w.mat(B::res2_wb).transpose() * du).cwiseProduct((1.0 - c.t2.array().square()).matrix());
  g.mat(B::res2_wa) += da2 * c.h1.transpose();
  g.mat(B::res2_ba) += da2.rowwise().sum();
  const Matrix dh1 = du + w.mat(B::res2_wa).transpose() * da2;

  g.mat(B::res1_wb) += dh1 * c.t1.transpose();
  g.mat(B::res1_bb) += dh1.rowwise().sum();
  const Matrix da1 = (w.mat(B::res1_wb).transpose() * dh1).cwiseProduct((1.0 - c.t1.array().square()).matrix());
  g.mat(B::res1_wa) += da1 * c.h0.transpose();
  g.mat(B::res1_ba) += da1.rowwise().sum();
  const Matrix dh0 = dh1 + w.mat(B::res1_wa).transpose() * da1;

  g.mat(B::proj_w) += dh0 * c.x.transpose();
  g.mat(B::proj_b) += dh0.rowwise().sum();
}

// Normalized input columns, one per (sample, node): column k*N + i.
Matrix input_columns(const EncoderParams& p, const Tensor3& history, std::span<const std::size_t> index) {
  const std::size_t P = history.dim(1), N = history.dim(2);
  if (P != p.lookback()) throw ShapeMismatch("history lookback " + std::to_string(P) + " != encoder lookback " +
                                             std::to_string(p.lookback()));
  Matrix x(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(index.size() * N));
  const double inv = 1.0 / p.input_scale;
  for (std::size_t k = 0; k < index.size(); ++k)
    for (std::size_t t = 0; t < P; ++t)
      for (std::size_t i = 0; i < N; ++i)
        x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k * N + i)) =
            (history(index[k], t, i) - p.input_mean) * inv;
  return x;
}

// Gates and aggregated embedding of one sample given the node summaries.
struct SampleGraphForward {
  Vector self_gate;  // [N]
  Matrix gate;       // [N x N], entry (i, j): source j -> target i; zero off-graph
  Matrix z;          // [d x N]
};

SampleGraphForward graph_forward(const EncoderParams& p, const Eigen::Ref<const Matrix>& u,
                                 const AdjacencyGraph& g) {
  const auto& w = p.weights;
  const auto bias = w.mat(B::head_bias);
  const Eigen::Index N = u.cols();
  SampleGraphForward f;
  const Matrix v00 = w.mat(B::head_00) * u;
  f.self_gate = ((u.cwiseProduct(v00).colwise().sum().array() + bias(0, 0)).tanh()).matrix().transpose();
  const Matrix m01 = (u.transpose() * (w.mat(B::head_01) * u)).array() + bias(1, 0);
  f.gate = Matrix::Zero(N, N);
  f.z = Matrix::Zero(u.rows(), N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& nb = g.neighbors[static_cast<std::size_t>(i)];
    Vector acc = f.self_gate(i) * u.col(i);
    for (std::size_t js : nb) {
      const auto j = static_cast<Eigen::Index>(js);
      f.gate(i, j) = std::tanh(m01(i, j));
      acc += f.gate(i, j) * u.col(j);
    }
    f.z.col(i) = acc / (static_cast<double>(nb.size()) + p.self_const);
  }
  return f;
}

// Accumulates head gradients into `g` and returns dL/du for the sample.
Matrix graph_backward(const EncoderParams& p, const Eigen::Ref<const Matrix>& u, const AdjacencyGraph& graph,
                      const SampleGraphForward& f, const Matrix& dz, ParamSet& g) {
  const auto& w = p.weights;
  const Eigen::Index N = u.cols();
  Matrix du = Matrix::Zero(u.rows(), N);
  Vector dm00 = Vector::Zero(N);
  Matrix dm01 = Matrix::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& nb = graph.neighbors[static_cast<std::size_t>(i)];
    const Vector gz = dz.col(i) / (static_cast<double>(nb.size()) + p.self_const);
    const double a = f.self_gate(i);
    dm00(i) = gz.dot(u.col(i)) * (1.0 - a * a);
    du.col(i) += a * gz;
    for (std::size_t js : nb) {
      const auto j = static_cast<Eigen::Index>(js);
      const double aj = f.gate(i, j);
      dm01(i, j) = gz.dot(u.col(j)) * (1.0 - aj * aj);
      du.col(j) += aj * gz;
    }
  }
  const Matrix ud00 = u * dm00.asDiagonal();
  g.mat(B::head_00) += ud00 * u.transpose();
  du += (w.mat(B::head_00) + w.mat(B::head_00).transpose()) * ud00;
  g.mat(B::head_01) += u * dm01 * u.transpose();
  du += w.mat(B::head_01) * u * dm01.transpose() + w.mat(B::head_01).transpose() * u * dm01;
  auto gb = g.mat(B::head_bias);
  gb(0, 0) += dm00.sum();
  gb(1, 0) += dm01.sum();
  return du;
}

void check_readout(const Readout& r, std::size_t features, std::size_t horizon) {
  const auto w = r.weights.mat(Readout::weight);
  if (static_cast<std::size_t>(w.cols()) != features || static_cast<std::size_t>(w.rows()) != horizon)
    throw ShapeMismatch("readout shape does not match data");
}

double history_rms(const Tensor3& h, double mean) {
  double s = 0.0;
  for (double v : h.values()) s += (v - mean) * (v - mean);
  return h.size() ? std::sqrt(s / static_cast<double>(h.size())) : 0.0;
}

std::string trace_text(const std::vector<EncoderEpoch>& trace) {
  std::ostringstream os;
  for (std::size_t e = 0; e < trace.size(); ++e)
    os << " [" << e << "] loss=" << format_double(trace[e].train_loss) << " val_mae=" << format_double(trace[e].val_mae);
  return os.str();
}

}  // namespace

EncoderParams::EncoderParams(std::size_t lookback, std::size_t latent) : lookback_(lookback), latent_(latent) {
  if (lookback < 2 || latent == 0) throw ConfigError("encoder needs lookback >= 2 and latent >= 1");
  const auto P = static_cast<Eigen::Index>(lookback), d = static_cast<Eigen::Index>(latent);
  weights.add("proj_w", d, P);
  weights.add("proj_b", d, 1);
  weights.add("res1_wa", d, d);
  weights.add("res1_ba", d, 1);
  weights.add("res1_wb", d, d);
  weights.add("res1_bb", d, 1);
  weights.add("res2_wa", d, d);
  weights.add("res2_ba", d, 1);
  weights.add("res2_wb", d, d);
  weights.add("res2_bb", d, 1);
  weights.add("head_00", d, d);
  weights.add("head_01", d, d);
  weights.add("head_10", d, d);
  weights.add("head_11", d, d);
  weights.add("head_bias", 4, 1);
}

EncoderParams EncoderParams::initialized(std::size_t lookback, std::size_t latent, Rng& rng) {
  EncoderParams p(lookback, latent);
  const double P = static_cast<double>(lookback), d = static_cast<double>(latent);
  p.weights.randomize(B::proj_w, 1.0 / std::sqrt(P), rng);
  for (auto blk : {B::res1_wa, B::res2_wa}) p.weights.randomize(blk, 1.0 / std::sqrt(d), rng);
  for (auto blk : {B::res1_wb, B::res2_wb}) p.weights.randomize(blk, 0.5 / std::sqrt(d), rng);
  for (auto blk : {B::head_00, B::head_01, B::head_10, B::head_11}) p.weights.randomize(blk, 0.5 / d, rng);
  auto bias = p.weights.mat(B::head_bias);
  bias(0, 0) = 0.5;
  bias(1, 0) = 0.5;
  return p;
}

Matrix summarize(const EncoderParams& params, const Matrix& series) {
  if (static_cast<std::size_t>(series.cols()) != params.lookback())
    throw ShapeMismatch("series length differs from encoder lookback");
  SummaryCache c;
  summarize_cached(params, (series.transpose().array() - params.input_mean) / params.input_scale, c);
  return c.u.transpose();
}

PairRepresentation pair_forward(const EncoderParams& params, const Matrix& target, const Matrix& source) {
  if (target.rows() != source.rows() || target.cols() != source.cols())
    throw ShapeMismatch("pair_forward: target and source shapes differ");
  const Matrix ut = summarize(params, target).transpose();  // [d x B]
  const Matrix us = summarize(params, source).transpose();
  const auto& w = params.weights;
  const auto c = w.mat(B::head_bias);
  const Eigen::Index Bn = target.rows();
  PairRepresentation out;
  out.interaction.resize(Bn, 4);
  out.interaction.col(0) = ut.cwiseProduct(w.mat(B::head_00) * ut).colwise().sum().transpose().array() + c(0, 0);
  out.interaction.col(1) = ut.cwiseProduct(w.mat(B::head_01) * us).colwise().sum().transpose().array() + c(1, 0);
  out.interaction.col(2) = us.cwiseProduct(w.mat(B::head_10) * ut).colwise().sum().transpose().array() + c(2, 0);
  out.interaction.col(3) = us.cwiseProduct(w.mat(B::head_11) * us).colwise().sum().transpose().array() + c(3, 0);
  out.self_gate = out.interaction.col(0).array().tanh();
  out.gate = out.interaction.col(1).array().tanh();
  out.rep = us.transpose();
  return out;
}

Matrix aggregate(const PairRepresentation& self, std::span<const PairRepresentation> neighbors, double self_const) {
  Matrix z = self.rep.array().colwise() * self.self_gate.array();
  for (const auto& n : neighbors) {
    if (n.rep.rows() != z.rows() || n.rep.cols() != z.cols()) throw ShapeMismatch("aggregate: rep shapes differ");
    z.array() += n.rep.array().colwise() * n.gate.array();
  }
  return z / (static_cast<double>(neighbors.size()) + self_const);
}

Matrix node_windows(const Tensor3& history, std::size_t node) {
  const std::size_t Bn = history.dim(0), P = history.dim(1);
  Matrix out(static_cast<Eigen::Index>(Bn), static_cast<Eigen::Index>(P));
  for (std::size_t b = 0; b < Bn; ++b)
    for (std::size_t t = 0; t < P; ++t) out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t)) = history(b, t, node);
  return out;
}

NodeEmbedding encode(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph) {
  return encode(params, history, graph, compute_priors(history, graph));
}

NodeEmbedding encode(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph,
                     const FeaturePriors& priors) {
  const std::size_t Bn = history.dim(0), N = history.dim(2), d = params.latent();
  if (graph.nodes() != N) throw ShapeMismatch("graph node count differs from history");
  if (priors.own.dim(0) != Bn || priors.own.dim(1) != N) throw ShapeMismatch("priors do not match history");
  const std::size_t q = priors.own.dim(2);
  NodeEmbedding out{Tensor3(Bn, N, d), Tensor3(Bn, N, d + 2 * q)};
  std::vector<std::size_t> index;
  for (std::size_t first = 0; first < Bn; first += kEncodeChunk) {
    const std::size_t count = std::min(kEncodeChunk, Bn - first);
    index.resize(count);
    std::iota(index.begin(), index.end(), first);
    SummaryCache c;
    summarize_cached(params, input_columns(params, history, index), c);
    for (std::size_t k = 0; k < count; ++k) {
      const auto f = graph_forward(params, c.u.middleCols(static_cast<Eigen::Index>(k * N), static_cast<Eigen::Index>(N)), graph);
      const std::size_t b = first + k;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t r = 0; r < d; ++r) {
          const double v = f.z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
          out.z(b, i, r) = v;
          out.z_aug(b, i, r) = v;
        }
        for (std::size_t s = 0; s < q; ++s) {
          out.z_aug(b, i, d + s) = priors.own(b, i, s);
          out.z_aug(b, i, d + q + s) = priors.aggregated(b, i, s);
        }
      }
    }
  }
  return out;
}

Matrix influence_snapshot(const EncoderParams& params, const Tensor3& history, const AdjacencyGraph& graph) {
  const std::size_t Bn = history.dim(0), N = history.dim(2);
  if (graph.nodes() != N) throw ShapeMismatch("graph node count differs from history");
  if (Bn == 0) throw ShapeMismatch("influence snapshot needs at least one window");
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  std::vector<std::size_t> index(Bn);
  std::iota(index.begin(), index.end(), 0);
  SummaryCache c;
  summarize_cached(params, input_columns(params, history, index), c);
  for (std::size_t k = 0; k < Bn; ++k) {
    const auto f = graph_forward(params, c.u.middleCols(static_cast<Eigen::Index>(k * N), static_cast<Eigen::Index>(N)), graph);
    s += f.gate.cwiseAbs();
    s.diagonal() += f.self_gate.cwiseAbs();
  }
  return s / static_cast<double>(Bn);
}

PriorScaler PriorScaler::fit(const FeaturePriors& priors) {
  const std::size_t rows = priors.own.dim(0) * priors.own.dim(1), q = priors.own.dim(2);
  PriorScaler s;
  s.mean.assign(2 * q, 0.0);
  s.scale.assign(2 * q, 1.0);
  if (rows == 0) return s;
  const auto own = priors.own.values();
  const auto agg = priors.aggregated.values();
  for (std::size_t c = 0; c < 2 * q; ++c) {
    const auto& src = c < q ? own : agg;
    const std::size_t k = c % q;
    double m = 0.0;
    for (std::size_t r = 0; r < rows; ++r) m += src[r * q + k];
    m /= static_cast<double>(rows);
    double v = 0.0;
    for (std::size_t r = 0; r < rows; ++r) v += (src[r * q + k] - m) * (src[r * q + k] - m);
    const double sd = std::sqrt(v / static_cast<double>(rows));
    s.mean[c] = m;
    s.scale[c] = sd < kScaleFloor ? 1.0 : sd;
  }
  return s;
}

Tensor3 PriorScaler::apply(const FeaturePriors& priors) const {
  const std::size_t Bn = priors.own.dim(0), N = priors.own.dim(1), q = priors.own.dim(2);
  if (mean.size() != 2 * q) throw ShapeMismatch("prior scaler width differs from priors");
  Tensor3 out(Bn, N, 2 * q);
  for (std::size_t b = 0; b < Bn; ++b)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < q; ++k) {
        out(b, i, k) = (priors.own(b, i, k) - mean[k]) / scale[k];
        out(b, i, q + k) = (priors.aggregated(b, i, k) - mean[q + k]) / scale[q + k];
      }
  return out;
}

Readout::Readout(std::size_t features, std::size_t horizon) {
  weights.add("weight", static_cast<Eigen::Index>(horizon), static_cast<Eigen::Index>(features));
  weights.add("bias", static_cast<Eigen::Index>(horizon), 1);
}

double encoder_objective(const EncoderParams& params, const Readout& readout, const EncoderTrainingData& data,
                         const AdjacencyGraph& graph, std::span<const std::size_t> index, EncoderParams* grad_params,
                         Readout* grad_readout) {
  const std::size_t N = data.history.dim(2), H = data.residual.dim(1), d = params.latent();
  const std::size_t q2 = data.priors.dim(2);
  check_readout(readout, d + q2, H);
  if (index.empty()) throw ShapeMismatch("encoder objective over an empty batch");
  const bool want_grad = grad_params != nullptr || grad_readout != nullptr;
  ParamSet genc = params.weights.zeros_like();
  ParamSet gread = readout.weights.zeros_like();

  SummaryCache c;
  summarize_cached(params, input_columns(params, data.history, index), c);
  const auto w = readout.weights.mat(Readout::weight);
  const auto bias = readout.weights.mat(Readout::bias);
  const double count = static_cast<double>(index.size() * N * H);

  Matrix du_all;
  if (want_grad) du_all = Matrix::Zero(c.u.rows(), c.u.cols());
  Matrix feat(static_cast<Eigen::Index>(d + q2), static_cast<Eigen::Index>(N));
  Matrix target(static_cast<Eigen::Index>(H), static_cast<Eigen::Index>(N));
  double sse = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const std::size_t b = index[k];
    const auto u = c.u.middleCols(static_cast<Eigen::Index>(k * N), static_cast<Eigen::Index>(N));
    const auto f = graph_forward(params, u, graph);
    feat.topRows(static_cast<Eigen::Index>(d)) = f.z;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t s = 0; s < q2; ++s)
        feat(static_cast<Eigen::Index>(d + s), static_cast<Eigen::Index>(i)) = data.priors(b, i, s);
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t i = 0; i < N; ++i)
        target(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(i)) = data.residual(b, h, i);
    const Matrix diff = ((w * feat).colwise() + bias.col(0)) - target;
    sse += diff.squaredNorm();
    if (!want_grad) continue;
    const Matrix dpred = diff * (2.0 / count);
    gread.mat(Readout::weight) += dpred * feat.transpose();
    gread.mat(Readout::bias) += dpred.rowwise().sum();
    const Matrix dz = w.leftCols(static_cast<Eigen::Index>(d)).transpose() * dpred;
    du_all.middleCols(static_cast<Eigen::Index>(k * N), static_cast<Eigen::Index>(N)) =
        graph_backward(params, u, graph, f, dz, genc);
  }
  if (want_grad) summarize_backward(params, c, du_all, genc);
  if (grad_params) {
    *grad_params = params;
    grad_params->weights = std::move(genc);
  }
  if (grad_readout) grad_readout->weights = std::move(gread);
  return sse / count;
}

double encoder_readout_mae(const EncoderParams& params, const Readout& readout, const EncoderTrainingData& data,
                           const AdjacencyGraph& graph) {
  const std::size_t Bn = data.history.dim(0), N = data.history.dim(2), H = data.residual.dim(1);
  if (Bn == 0) throw EmptyValidation("no samples to score");
  const std::size_t d = params.latent(), q2 = data.priors.dim(2);
  check_readout(readout, d + q2, H);
  const auto w = readout.weights.mat(Readout::weight);
  const auto bias = readout.weights.mat(Readout::bias);
  double sae = 0.0;
  std::vector<std::size_t> index;
  Matrix feat(static_cast<Eigen::Index>(d + q2), static_cast<Eigen::Index>(N));
  for (std::size_t first = 0; first < Bn; first += kEncodeChunk) {
    const std::size_t count = std::min(kEncodeChunk, Bn - first);
    index.resize(count);
    std::iota(index.begin(), index.end(), first);
    SummaryCache c;
    summarize_cached(params, input_columns(params, data.history, index), c);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t b = first + k;
      const auto f = graph_forward(params, c.u.middleCols(static_cast<Eigen::Index>(k * N), static_cast<Eigen::Index>(N)), graph);
      feat.topRows(static_cast<Eigen::Index>(d)) = f.z;
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t s = 0; s < q2; ++s)
          feat(static_cast<Eigen::Index>(d + s), static_cast<Eigen::Index>(i)) = data.priors(b, i, s);
      const Matrix pred = (w * feat).colwise() + bias.col(0);
      for (std::size_t h = 0; h < H; ++h)
        for (std::size_t i = 0; i < N; ++i)
          sae += std::abs(pred(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(i)) - data.residual(b, h, i));
    }
  }
  return sae / static_cast<double>(Bn * N * H);
}

EncoderTrainingResult train_encoder(const EncoderParams& init, const ForecastInstance& train,
                                    const ForecastInstance& val, const AdjacencyGraph& graph,
                                    const RunConfig& config) {
  if (val.samples() == 0) throw EmptyValidation("encoder early stopping needs validation windows");
  if (train.samples() == 0) throw InsufficientRows("no training windows");
  const auto train_priors = compute_priors(train.history, graph);
  const auto val_priors = compute_priors(val.history, graph);
  const PriorScaler scaler = PriorScaler::fit(train_priors);
  const EncoderTrainingData tr{train.history, scaler.apply(train_priors), compute_residuals(train).raw};
  const EncoderTrainingData va{val.history, scaler.apply(val_priors), compute_residuals(val).raw};

  EncoderTrainingResult result;
  EncoderParams params = init;
  Readout readout(params.latent() + tr.priors.dim(2), train.horizon());
  AdamOptimizer opt_enc(params.weights.size(), config.encoder_lr, config.encoder_weight_decay);
  AdamOptimizer opt_read(readout.weights.size(), config.encoder_lr, config.encoder_weight_decay);
  Rng rng = make_rng(config.seed, "encoder_batches");

  std::vector<std::size_t> order(train.samples());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  double best = std::numeric_limits<double>::infinity();
  EncoderParams best_params = params;
  std::size_t stale = 0;
  EncoderParams gp;
  Readout gr;
  for (std::size_t epoch = 0; epoch < config.encoder_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t first = 0; first < order.size(); first += batch) {
      const std::size_t count = std::min(batch, order.size() - first);
      const std::span<const std::size_t> idx(order.data() + first, count);
      const double loss = encoder_objective(params, readout, tr, graph, idx, &gp, &gr);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("encoder epoch " + std::to_string(epoch) + " batch " + std::to_string(first / batch) +
                            ";" + trace_text(result.trace));
      }
      loss_sum += loss * static_cast<double>(count);
      seen += count;
      opt_enc.step(params.weights.values(), gp.weights.values());
      opt_read.step(readout.weights.values(), gr.weights.values());
    }
    const double val_mae = encoder_readout_mae(params, readout, va, graph);
    result.trace.push_back({loss_sum / static_cast<double>(seen), val_mae});
    if (!std::isfinite(val_mae)) throw NonFiniteLoss("encoder validation MAE diverged;" + trace_text(result.trace));
    if (val_mae < best) {
      best = val_mae;
      best_params = params;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.params = std::move(best_params);
  return result;
}

EncoderTrainingResult train_encoder(const ForecastInstance& train, const ForecastInstance& val,
                                    const AdjacencyGraph& graph, const RunConfig& config) {
  Rng rng = make_rng(config.seed, "encoder_init");
  EncoderParams init = EncoderParams::initialized(train.lookback(), config.latent_dim, rng);
  double mean = 0.0;
  for (double v : train.history.values()) mean += v;
  mean = train.history.size() ? mean / static_cast<double>(train.history.size()) : 0.0;
  const double sd = history_rms(train.history, mean);
  init.input_mean = mean;
  init.input_scale = sd < kScaleFloor ? 1.0 : sd;
  return train_encoder(init, train, val, graph, config);
}

}  // namespace crc
