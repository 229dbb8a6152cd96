#include "crc/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crc/error.hpp"

namespace crc {

namespace {

constexpr double kMeanFloor = 1e-8;
constexpr double kRatioClamp = 10.0;
constexpr double kVarianceFloor = 1e-24;

}  // namespace

WindowStatistics::WindowStatistics(std::size_t lookback) : lookback_(lookback), cos_(lookback), sin_(lookback) {
  if (lookback < 2) throw ConfigError("priors need lookback >= 2");
  for (std::size_t t = 0; t < lookback; ++t) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(lookback);
    cos_[t] = std::cos(a);
    sin_[t] = std::sin(a);
  }
}

double WindowStatistics::dominant_power_fraction(std::span<const double> x) const {
  const std::size_t P = lookback_;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(P);
  double total = 0.0, best = 0.0;
  for (std::size_t k = 1; k <= P / 2; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < P; ++t) {
      const double v = x[t] - mean;
      re += v * cos_[idx];
      im -= v * sin_[idx];
      idx += k;
      if (idx >= P) idx -= P;
    }
    const double power = re * re + im * im;
    total += power;
    best = std::max(best, power);
  }
  return total > kVarianceFloor * static_cast<double>(P * P) ? best / total : 0.0;
}

PriorVector WindowStatistics::operator()(std::span<const double> x) const {
  if (x.size() != lookback_) throw ShapeMismatch("window length differs from lookback");
  const std::size_t P = lookback_;
  PriorVector f{};
  double mean = 0.0, lo = x[0], hi = x[0];
  for (double v : x) {
    mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  mean /= static_cast<double>(P);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  double lag = 0.0;
  for (std::size_t t = 0; t + 1 < P; ++t) lag += (x[t] - mean) * (x[t + 1] - mean);

  double dmean = 0.0;
  for (std::size_t t = 1; t < P; ++t) dmean += x[t] - x[t - 1];
  dmean /= static_cast<double>(P - 1);
  double dvar = 0.0;
  for (std::size_t t = 1; t < P; ++t) {
    const double d = x[t] - x[t - 1] - dmean;
    dvar += d * d;
  }
  dvar /= static_cast<double>(P - 1);

  const std::size_t q = std::max<std::size_t>(1, P / 4);
  double qmean = 0.0;
  for (std::size_t t = P - q; t < P; ++t) qmean += x[t];
  qmean /= static_cast<double>(q);

  f[static_cast<std::size_t>(Prior::mean)] = mean;
  f[static_cast<std::size_t>(Prior::std)] = std::sqrt(var / static_cast<double>(P));
  f[static_cast<std::size_t>(Prior::min)] = lo;
  f[static_cast<std::size_t>(Prior::max)] = hi;
  f[static_cast<std::size_t>(Prior::last)] = x[P - 1];
  f[static_cast<std::size_t>(Prior::diff_mean)] = dmean;
  f[static_cast<std::size_t>(Prior::diff_std)] = std::sqrt(dvar);
  f[static_cast<std::size_t>(Prior::lag1_autocorr)] =
      var > kVarianceFloor * static_cast<double>(P) ? lag / var : 0.0;
  f[static_cast<std::size_t>(Prior::last_quarter_ratio)] =
      std::abs(mean) < kMeanFloor ? 1.0 : std::clamp(qmean / mean, -kRatioClamp, kRatioClamp);
  f[static_cast<std::size_t>(Prior::dominant_power_fraction)] = dominant_power_fraction(x);
  return f;
}

FeaturePriors compute_priors(const Tensor3& history, const AdjacencyGraph& graph) {
  const std::size_t B = history.dim(0), P = history.dim(1), N = history.dim(2);
  if (graph.nodes() != N) throw ShapeMismatch("graph node count differs from history");
  const WindowStatistics stats(P);
  FeaturePriors out{Tensor3(B, N, kPriorCount), Tensor3(B, N, kPriorCount)};
  std::vector<double> window(P);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t t = 0; t < P; ++t) window[t] = history(b, t, i);
      const PriorVector f = stats(window);
      for (std::size_t k = 0; k < kPriorCount; ++k) out.own(b, i, k) = f[k];
    }
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j : graph.neighbors[i]) {
        const double w = graph.normalized(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        for (std::size_t k = 0; k < kPriorCount; ++k) out.aggregated(b, i, k) += w * out.own(b, j, k);
      }
    }
  }
  return out;
}

}  // namespace crc
