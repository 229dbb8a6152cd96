#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "crc/error.hpp"
#include "crc/graph.hpp"
#include "crc/priors.hpp"
#include "support.hpp"

namespace crc {
namespace {

double naive_pearson(const Matrix& x, Eigen::Index a, Eigen::Index b) {
  const double n = static_cast<double>(x.rows());
  const double ma = x.col(a).sum() / n, mb = x.col(b).sum() / n;
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    sab += (x(t, a) - ma) * (x(t, b) - mb);
    saa += (x(t, a) - ma) * (x(t, a) - ma);
    sbb += (x(t, b) - mb) * (x(t, b) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Graph, PearsonMatchesDirectFormula) {
  const Matrix x = testing::random_matrix(50, 4, 3);
  const Matrix c = pearson_correlation(x);
  for (Eigen::Index a = 0; a < 4; ++a)
    for (Eigen::Index b = 0; b < 4; ++b)
      EXPECT_NEAR(c(a, b), a == b ? 1.0 : naive_pearson(x, a, b), 1e-12);
}

TEST(Graph, DuplicatedNodesLinkEachOther) {
  Matrix x = testing::random_matrix(200, 3, 4);
  x.col(1) = x.col(0);
  EXPECT_NEAR(naive_pearson(x, 0, 1), 1.0, 1e-12);
  EXPECT_LT(std::abs(naive_pearson(x, 0, 2)), 0.3);
  const auto g = build_correlation_knn(x, 1);
  EXPECT_EQ(g.adjacency(0, 1), 1.0);
  EXPECT_EQ(g.adjacency(1, 0), 1.0);
  EXPECT_EQ(g.neighbors[0], (std::vector<std::size_t>{1}));
  EXPECT_EQ(g.neighbors[1], (std::vector<std::size_t>{0}));
}

TEST(Graph, NegativeCorrelationCountsByMagnitude) {
  Matrix x = testing::random_matrix(200, 3, 5);
  x.col(2) = -x.col(0) + 0.01 * x.col(1);
  const auto g = build_correlation_knn(x, 1);
  EXPECT_EQ(g.neighbors[0], (std::vector<std::size_t>{2}));
}

TEST(Graph, FullKIsCompleteWithoutDiagonal) {
  const Matrix x = testing::random_matrix(40, 5, 6);
  const auto g = build_correlation_knn(x, 4);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) EXPECT_EQ(g.adjacency(i, j), i == j ? 0.0 : 1.0);
}

TEST(Graph, NormalizedRowsSumToOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix x = testing::random_matrix(30, 7, seed);
    for (std::size_t k = 1; k < 7; ++k) {
      const auto g = build_correlation_knn(x, k);
      for (Eigen::Index i = 0; i < 7; ++i) {
        EXPECT_NEAR(g.normalized.row(i).sum(), 1.0, 1e-12);
        EXPECT_EQ(g.adjacency.row(i).sum(), static_cast<double>(k));
        EXPECT_EQ(g.adjacency(i, i), 0.0);
      }
    }
  }
}

TEST(Graph, RejectsBadInputs) {
  const Matrix x = testing::random_matrix(10, 3, 1);
  EXPECT_THROW(build_correlation_knn(x, 3), ConfigError);
  EXPECT_THROW(build_correlation_knn(x.topRows(1), 1), DegenerateSeries);
  EXPECT_THROW(AdjacencyGraph::from_neighbors({{0}}), ConfigError);
}

TEST(Graph, EdgeListRoundTrip) {
  const auto g = build_correlation_knn(testing::random_matrix(30, 6, 2), 2);
  const auto back = parse_edge_list(edge_list(g), 6);
  EXPECT_EQ(back.adjacency, g.adjacency);
  EXPECT_THROW(parse_edge_list("target,source\n0,9\n", 6), ParseError);
}

TEST(Priors, ConstantWindowDegenerateRules) {
  const WindowStatistics stats(16);
  const std::vector<double> w(16, 3.0);
  const auto f = stats(w);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::mean)], 3.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::std)], 0.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::diff_mean)], 0.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::lag1_autocorr)], 0.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::dominant_power_fraction)], 0.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::last_quarter_ratio)], 1.0);
  const std::vector<double> zero(16, 0.0);
  EXPECT_EQ(stats(zero)[static_cast<std::size_t>(Prior::last_quarter_ratio)], 1.0);
}

TEST(Priors, StatisticsMatchDirectEvaluation) {
  const std::vector<double> w{1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0, 6.0};
  const auto f = WindowStatistics(8)(w);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(Prior::mean)], 4.5);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(Prior::std)], std::sqrt(42.0 / 8.0));
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::min)], 1.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::max)], 8.0);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::last)], 6.0);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(Prior::diff_mean)], 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(Prior::last_quarter_ratio)], 4.5 / 4.5);
  double lag = 0;
  for (std::size_t t = 0; t + 1 < 8; ++t) lag += (w[t] - 4.5) * (w[t + 1] - 4.5);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(Prior::lag1_autocorr)], lag / 42.0);
}

TEST(Priors, RatioIsClamped) {
  std::vector<double> w(8, -1.0);
  w[0] = 7.001;  // mean 1.25e-4, last-quarter mean -1
  const auto f = WindowStatistics(8)(w);
  EXPECT_EQ(f[static_cast<std::size_t>(Prior::last_quarter_ratio)], -10.0);
}

double naive_dominant_fraction(const std::vector<double>& x) {
  const std::size_t P = x.size();
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(P);
  double total = 0, best = 0;
  for (std::size_t k = 1; k <= P / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < P; ++t)
      acc += (x[t] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t) /
                                                 static_cast<double>(P));
    total += std::norm(acc);
    best = std::max(best, std::norm(acc));
  }
  return best / total;
}

TEST(Priors, DominantPowerMatchesNaiveDft) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (std::size_t P : {8u, 17u, 96u}) {
    const WindowStatistics stats(P);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> x(P);
      for (double& v : x) v = n(rng);
      EXPECT_NEAR(stats.dominant_power_fraction(x), naive_dominant_fraction(x), 1e-12);
    }
  }
}

TEST(Priors, PureSineConcentratesPower) {
  const std::size_t P = 96;
  std::vector<double> x(P);
  for (std::size_t t = 0; t < P; ++t) x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / (P / 4.0));
  EXPECT_GT(WindowStatistics(P).dominant_power_fraction(x), 0.9);
}

TEST(Priors, AggregationUsesNormalizedNeighborsAndIsolatedIsZero) {
  const Tensor3 h = testing::random_tensor(3, 12, 3, 4);
  const auto g = AdjacencyGraph::from_neighbors({{1, 2}, {0}, {}});
  const auto p = compute_priors(h, g);
  ASSERT_EQ(p.own.dims(), (std::array<std::size_t, 3>{3, 3, kPriorCount}));
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t k = 0; k < kPriorCount; ++k) {
      EXPECT_NEAR(p.aggregated(b, 0, k), 0.5 * (p.own(b, 1, k) + p.own(b, 2, k)), 1e-14);
      EXPECT_EQ(p.aggregated(b, 1, k), p.own(b, 0, k));
      EXPECT_EQ(p.aggregated(b, 2, k), 0.0);
    }
  }
}

TEST(Priors, AllValuesFinite) {
  const Tensor3 h = testing::random_tensor(20, 24, 4, 5, 50.0);
  const auto g = build_correlation_knn(flatten_history(h), 2);
  const auto p = compute_priors(h, g);
  for (double v : p.own.values()) EXPECT_TRUE(std::isfinite(v));
  for (double v : p.aggregated.values()) EXPECT_TRUE(std::isfinite(v));
}

}  // namespace
}  // namespace crc
