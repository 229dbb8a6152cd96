#include <numeric>

#include <gtest/gtest.h>

#include "crc/config.hpp"
#include "crc/corrector.hpp"
#include "crc/graph.hpp"
#include "crc/metrics.hpp"
#include "crc/mlp.hpp"
#include "crc/rng.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

namespace crc {
namespace {

using B = MlpModel::Block;

MlpModel random_model(std::size_t D, std::size_t N, std::size_t H, std::size_t hidden, std::size_t E,
                      std::uint64_t seed) {
  Rng rng(seed);
  MlpModel m = MlpModel::initialized(D, N, H, hidden, E, rng);
  m.weights.randomize(B::w2, 0.3, rng);
  m.weights.randomize(B::b2, 0.3, rng);
  m.weights.randomize(B::b1, 0.3, rng);
  return m;
}

TEST(Mlp, ZeroWeightsGiveZeroOutput) {
  MlpModel m(4, 3, 2, 8, 2);
  EXPECT_EQ(testing::max_abs(predict_mlp(m, testing::random_tensor(5, 3, 4, 1))), 0.0);
  Rng rng(2);
  // Output layer starts at zero, so a fresh model is also silent.
  const MlpModel fresh = MlpModel::initialized(4, 3, 2, 8, 2, rng);
  EXPECT_EQ(testing::max_abs(predict_mlp(fresh, testing::random_tensor(5, 3, 4, 1))), 0.0);
}

TEST(Mlp, ShapeAndDeterminism) {
  const MlpModel m = random_model(4, 3, 5, 8, 2, 3);
  const Tensor3 x = testing::random_tensor(6, 3, 4, 4);
  const Tensor3 y = predict_mlp(m, x);
  EXPECT_EQ(y.dims(), (std::array<std::size_t, 3>{6, 5, 3}));
  EXPECT_EQ(predict_mlp(m, x), y);
}

TEST(Mlp, NodeEmbeddingDistinguishesNodes) {
  const MlpModel m = random_model(4, 2, 3, 8, 2, 5);
  Tensor3 x(1, 2, 4, 0.5);
  const Tensor3 y = predict_mlp(m, x);
  EXPECT_GT(std::abs(y(0, 0, 0) - y(0, 0, 1)), 1e-6);
}

TEST(Mlp, InputScalingStandardizesColumns) {
  MlpModel m(3, 2, 1, 4, 1);
  Tensor3 x = testing::random_tensor(50, 2, 3, 6);
  for (double& v : x.values()) v = 5.0 * v + 2.0;
  m.fit_input_scaling(x);
  ASSERT_EQ(m.input_mean.size(), 3u);
  double mu = 0;
  for (std::size_t b = 0; b < 50; ++b)
    for (std::size_t i = 0; i < 2; ++i) mu += x(b, i, 1);
  EXPECT_NEAR(m.input_mean[1], mu / 100.0, 1e-12);
  EXPECT_GT(m.input_scale[1], 3.0);
}

TEST(MlpGradient, MatchesFiniteDifferences) {
  MlpModel m = random_model(5, 3, 4, 6, 2, 7);
  m.input_mean = {0.1, -0.2, 0.0, 0.3, 0.5};
  m.input_scale = {1.0, 2.0, 0.5, 1.5, 1.0};
  const Tensor3 x = testing::random_tensor(7, 3, 5, 8);
  const Tensor3 t = testing::random_tensor(7, 4, 3, 9);
  const std::vector<std::size_t> idx{0, 2, 3, 6};
  ParamSet grad;
  mlp_objective(m, x, t, idx, &grad);
  const auto loss = [&] { return mlp_objective(m, x, t, idx, nullptr); };
  const auto c = testing::check_gradient(m.weights.values(), grad.values(), loss);
  EXPECT_LT(c.max_rel, 1e-4);
  EXPECT_LT(c.norm_rel, 1e-6);
}

TEST(MlpGradient, LossIsMeanSquaredError) {
  const MlpModel m = random_model(3, 2, 2, 4, 1, 10);
  const Tensor3 x = testing::random_tensor(4, 2, 3, 11);
  const Tensor3 t = testing::random_tensor(4, 2, 2, 12);
  std::vector<std::size_t> idx(4);
  std::iota(idx.begin(), idx.end(), 0);
  EXPECT_NEAR(mlp_objective(m, x, t, idx, nullptr), mse(predict_mlp(m, x), t), 1e-14);
}

TEST(MlpTraining, ZeroTargetStaysSilent) {
  const Tensor3 x = testing::random_tensor(40, 3, 4, 13);
  const Tensor3 zero(40, 2, 3);
  RunConfig cfg;
  cfg.mlp_epochs = 5;
  const auto res = fit_mlp(x.slice(0, 30), zero.slice(0, 30), x.slice(30, 10), zero.slice(30, 10), cfg);
  for (const auto& e : res.trace) EXPECT_EQ(e.train_loss, 0.0);
  EXPECT_EQ(testing::max_abs(predict_mlp(res.model, x)), 0.0);
}

TEST(MlpTraining, LearnsQuadraticCrossTermBeyondRidge) {
  RandomSpecOptions o;
  o.nodes = 4;
  o.quadratic = 0.25;
  o.cross_strength = 0.1;
  o.sigma = 0.02;
  o.length = 1500;
  o.seed = 5;
  const SyntheticSpec spec = random_spec(o);
  const auto ds = generate_synthetic(spec, testing::small_shape(4, 16, 2));
  RunConfig cfg;
  cfg.knn_k = 2;
  cfg.mlp_lr = 3e-3;
  cfg.mlp_epochs = 60;
  cfg.encoder_epochs = 5;
  const auto g = build_correlation_knn(ds.split.train_series(), cfg.knn_k);
  PipelineOptions opt;
  opt.features = FeatureMode::priors;
  const auto model = fit_corrector(ds.split, g, cfg, opt);
  const auto d = predict_deltas(model, ds.split.val.history, g);
  const Tensor3 e = *ds.split.val.target - ds.split.val.base_forecast - d.ridge;
  const double ridge_power = mse(Tensor3(e.dim(0), e.dim(1), e.dim(2)), e);
  const double mlp_loss = mse(d.mlp, e);
  EXPECT_LT(mlp_loss, ridge_power);
}

}  // namespace
}  // namespace crc
