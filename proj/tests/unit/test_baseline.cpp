#include <gtest/gtest.h>

#include "crc/baseline.hpp"
#include "crc/error.hpp"
#include "crc/metrics.hpp"
#include "support.hpp"

namespace crc {
namespace {

TEST(Persistence, RepeatsLastValue) {
  Tensor3 h(1, 4, 2, 1.0);
  h(0, 3, 0) = 7.0;
  const Tensor3 f = persistence(h, 5);
  ASSERT_EQ(f.dim(1), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(f(0, t, 0), 7.0);
    EXPECT_EQ(f(0, t, 1), 1.0);
  }
}

TEST(Persistence, SingleStepEqualsLastValue) {
  const Tensor3 h = testing::random_tensor(3, 6, 2, 1);
  const Tensor3 f = persistence(h, 1);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(f(b, 0, i), h(b, 5, i));
}

TEST(Persistence, ConstantSeriesHasZeroResidual) {
  const Tensor3 h(4, 6, 3, 2.5);
  const Tensor3 y(4, 3, 3, 2.5);
  EXPECT_EQ(mae(persistence(h, 3), y), 0.0);
}

TEST(SeasonalPersistence, RepeatsLastPeriod) {
  Tensor3 h(1, 6, 1);
  for (std::size_t p = 0; p < 6; ++p) h(0, p, 0) = static_cast<double>(p);
  const Tensor3 f = seasonal_persistence(h, 5, 3);
  const double want[] = {3, 4, 5, 3, 4};
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(f(0, t, 0), want[t]);
  EXPECT_THROW(seasonal_persistence(h, 2, 7), ShapeMismatch);
}

// Noiseless AR(1) paths windowed into history/target pairs.
void ar1_windows(double phi, std::size_t B, std::size_t P, std::size_t H, Tensor3& hist, Tensor3& target) {
  hist = Tensor3(B, P, 1);
  target = Tensor3(B, H, 1);
  for (std::size_t b = 0; b < B; ++b) {
    double x = 1.0 + 0.01 * static_cast<double>(b);
    for (std::size_t p = 0; p < P; ++p) {
      hist(b, p, 0) = x;
      x *= phi;
    }
    for (std::size_t h = 0; h < H; ++h) {
      target(b, h, 0) = x;
      x *= phi;
    }
  }
}

TEST(LinearBaseline, NoiselessAr1IsFitExactly) {
  Tensor3 h, y;
  ar1_windows(0.8, 50, 4, 3, h, y);
  LinearBaseline lb;
  lb.fit(h, y);
  EXPECT_LT(mse(lb.predict(h), y), 1e-8);
}

TEST(LinearBaseline, ContinuesLinearTrend) {
  const std::size_t B = 30, P = 5, H = 4;
  Tensor3 h(B, P, 2), y(B, H, 2);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double a = 0.3 * static_cast<double>(b) - 1.0 * static_cast<double>(i);
      const double slope = 0.1 + 0.05 * static_cast<double>(b % 7) + static_cast<double>(i);
      for (std::size_t p = 0; p < P; ++p) h(b, p, i) = a + slope * static_cast<double>(p);
      for (std::size_t t = 0; t < H; ++t) y(b, t, i) = a + slope * static_cast<double>(P + t);
    }
  }
  LinearBaseline lb;
  lb.fit(h, y);
  Tensor3 probe(1, P, 2), want(1, H, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t p = 0; p < P; ++p) probe(0, p, i) = 2.0 - 0.7 * static_cast<double>(p);
    for (std::size_t t = 0; t < H; ++t) want(0, t, i) = 2.0 - 0.7 * static_cast<double>(P + t);
  }
  // The fit carries a small jitter penalty, so the trend is matched closely but not exactly.
  EXPECT_LT(testing::max_abs_diff(lb.predict(probe), want), 1e-4);
}

TEST(LinearBaseline, ZeroVarianceColumnHandled) {
  Tensor3 h(20, 3, 2, 1.0);
  Tensor3 y(20, 2, 2, 1.0);
  for (std::size_t b = 0; b < 20; ++b) h(b, 2, 1) = static_cast<double>(b);
  LinearBaseline lb;
  EXPECT_NO_THROW(lb.fit(h, y));
  EXPECT_LT(mse(lb.predict(h), y), 1e-6);
}

TEST(LinearBaseline, ErrorsOnMisuse) {
  LinearBaseline lb;
  EXPECT_THROW(lb.predict(Tensor3(1, 3, 1)), MissingStage);
  EXPECT_THROW(lb.fit(Tensor3(3, 3, 1), Tensor3(2, 2, 1)), ShapeMismatch);
}

TEST(BaselineSpec, ParseAndName) {
  EXPECT_EQ(BaselineSpec::parse("linear").kind, BaselineKind::linear);
  EXPECT_EQ(BaselineSpec::parse("persistence").name(), "persistence");
  const auto s = BaselineSpec::parse("seasonal:12");
  EXPECT_EQ(s.period, 12u);
  EXPECT_EQ(s.name(), "seasonal:12");
  EXPECT_THROW(BaselineSpec::parse("arima"), ConfigError);
  EXPECT_THROW(BaselineSpec::parse("seasonal:0"), ConfigError);
}

}  // namespace
}  // namespace crc
