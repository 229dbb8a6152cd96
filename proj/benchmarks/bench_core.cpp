#include <algorithm>
#include <random>

#include <benchmark/benchmark.h>

#include "crc/config.hpp"
#include "crc/encoder.hpp"
#include "crc/graph.hpp"
#include "crc/pipeline.hpp"
#include "crc/priors.hpp"
#include "crc/ridge.hpp"
#include "crc/rng.hpp"
#include "crc/safety.hpp"
#include "crc/synthetic.hpp"

namespace {

using namespace crc;

Tensor3 noise(std::size_t a, std::size_t b, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  Tensor3 t(a, b, c);
  for (double& v : t.values()) v = z(rng);
  return t;
}

Matrix noise(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = z(rng);
  return m;
}

void BM_SolveRidge(benchmark::State& state) {
  const auto p = static_cast<Eigen::Index>(state.range(0));
  const Matrix g = noise(4 * p, p, 1);
  const Matrix r = noise(4 * p, 24, 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ridge(g, r, 1.0));
}
BENCHMARK(BM_SolveRidge)->Arg(16)->Arg(64)->Arg(256);

void BM_Priors(benchmark::State& state) {
  const auto P = static_cast<std::size_t>(state.range(0));
  const Tensor3 h = noise(32, P, 8, 3);
  const auto g = build_correlation_knn(noise(static_cast<Eigen::Index>(4 * P), 8, 4), 5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_priors(h, g));
}
BENCHMARK(BM_Priors)->Arg(24)->Arg(96)->Arg(336);

void BM_Encode(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const Tensor3 h = noise(32, 96, N, 5);
  const auto g = build_correlation_knn(noise(400, static_cast<Eigen::Index>(N), 6), std::min<std::size_t>(5, N - 1));
  Rng rng(7);
  const EncoderParams p = EncoderParams::initialized(96, 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encode(p, h, g));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Encode)->Arg(8)->Arg(32)->Arg(128);

void BM_CorrelationKnn(benchmark::State& state) {
  const auto N = static_cast<Eigen::Index>(state.range(0));
  const Matrix s = noise(2000, N, 8);
  for (auto _ : state) benchmark::DoNotOptimize(build_correlation_knn(s, 5));
}
BENCHMARK(BM_CorrelationKnn)->Arg(8)->Arg(64)->Arg(256);

void BM_ApplyPolicy(benchmark::State& state) {
  const Tensor3 base = noise(256, 24, 8, 9), truth = noise(256, 24, 8, 10);
  const Tensor3 dr = noise(256, 24, 8, 11), dm = noise(256, 24, 8, 12);
  const SafetyPolicy policy = calibrate_policy(base, truth, dr, dm, RunConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(apply_policy(policy, dr, dm, base));
}
BENCHMARK(BM_ApplyPolicy);

void BM_Pipeline(benchmark::State& state) {
  RandomSpecOptions o;
  o.nodes = 8;
  o.length = static_cast<std::size_t>(state.range(0));
  Shape shape;
  shape.nodes = 8;
  shape.lookback = 96;
  shape.horizon = 24;
  const auto ds = generate_synthetic(random_spec(o), shape);
  RunConfig cfg;
  const auto g = build_correlation_knn(ds.split.train_series(), cfg.knn_k);
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(ds.split, g, cfg));
}
BENCHMARK(BM_Pipeline)->Arg(2000)->Arg(5000)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
