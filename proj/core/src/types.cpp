#include "crc/types.hpp"

#include <cmath>

#include "crc/error.hpp"

namespace crc {

void Shape::validate() const {
  if (batch == 0 || lookback == 0 || horizon == 0 || nodes == 0 || latent == 0) {
    throw ConfigError("all shape dimensions must be positive");
  }
  if (lookback < 2) throw ConfigError("lookback must be at least 2");
}

const Tensor3& ForecastInstance::target_or_throw() const {
  if (!target) throw MissingTarget("instance has no target tensor");
  return *target;
}

namespace {

void require_finite(const Tensor3& t, const char* name) {
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j)
      for (std::size_t k = 0; k < t.dim(2); ++k)
        if (!std::isfinite(t(i, j, k)))
          throw NonFinite(std::string(name) + " at (" + std::to_string(i) + "," +
                          std::to_string(j) + "," + std::to_string(k) + ")");
}

}  // namespace

const ForecastInstance& validate_instance(const ForecastInstance& inst) {
  const auto& h = inst.history;
  const auto& b = inst.base_forecast;
  if (h.empty() || b.empty()) throw ShapeMismatch("history and base forecast must be non-empty");
  if (h.dim(0) != b.dim(0) || h.dim(2) != b.dim(2)) {
    throw ShapeMismatch("history " + h.shape_string() + " vs base forecast " + b.shape_string());
  }
  if (inst.target) require_same_shape(*inst.target, b, "target vs base forecast");
  require_finite(h, "history");
  require_finite(b, "base_forecast");
  if (inst.target) require_finite(*inst.target, "target");
  return inst;
}

ResidualSet compute_residuals(const ForecastInstance& inst, const Tensor3* ridge_delta) {
  const Tensor3& y = inst.target_or_throw();
  ResidualSet out;
  out.raw = y - inst.base_forecast;
  if (ridge_delta) {
    require_same_shape(*ridge_delta, y, "ridge delta vs target");
    Tensor3 e = y;
    auto ev = e.values();
    auto bv = inst.base_forecast.values();
    auto dv = ridge_delta->values();
    for (std::size_t i = 0; i < ev.size(); ++i) ev[i] -= bv[i] + dv[i];
    out.post_ridge = std::move(e);
  }
  return out;
}

Matrix DatasetSplit::train_series() const {
  return series.middleRows(static_cast<Eigen::Index>(bounds.train_begin),
                           static_cast<Eigen::Index>(bounds.train_end - bounds.train_begin));
}

std::size_t window_count(std::size_t begin, std::size_t end, std::size_t lookback,
                         std::size_t horizon) {
  const std::size_t need = lookback + horizon;
  if (end < begin || end - begin < need) return 0;
  return end - begin - need + 1;
}

SplitBounds make_bounds(std::size_t rows, const SplitFractions& fr, std::size_t lookback,
                        std::size_t horizon) {
  if (fr.train <= 0 || fr.val <= 0 || fr.test <= 0 ||
      std::abs(fr.train + fr.val + fr.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
  SplitBounds b;
  b.train_begin = 0;
  b.train_end = static_cast<std::size_t>(std::floor(fr.train * static_cast<double>(rows)));
  b.val_begin = b.train_end;
  b.val_end = b.val_begin + static_cast<std::size_t>(std::floor(fr.val * static_cast<double>(rows)));
  b.test_begin = b.val_end;
  b.test_end = rows;
  const auto check = [&](std::size_t lo, std::size_t hi, const char* name, std::size_t min_windows) {
    const std::size_t n = window_count(lo, hi, lookback, horizon);
    if (n < min_windows) {
      throw InsufficientRows(std::string(name) + " segment of " + std::to_string(hi - lo) +
                             " rows yields " + std::to_string(n) + " windows, need " +
                             std::to_string(min_windows));
    }
  };
  check(b.train_begin, b.train_end, "train", 1);
  check(b.val_begin, b.val_end, "validation", kMinValidationSamples);
  check(b.test_begin, b.test_end, "test", 1);
  return b;
}

void extract_windows(const Matrix& series, std::size_t begin, std::size_t end,
                     std::size_t lookback, std::size_t horizon, Tensor3& history, Tensor3& target) {
  const std::size_t n = window_count(begin, end, lookback, horizon);
  const auto nodes = static_cast<std::size_t>(series.cols());
  history = Tensor3(n, lookback, nodes);
  target = Tensor3(n, horizon, nodes);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t0 = begin + s;
    for (std::size_t p = 0; p < lookback; ++p)
      for (std::size_t i = 0; i < nodes; ++i)
        history(s, p, i) = series(static_cast<Eigen::Index>(t0 + p), static_cast<Eigen::Index>(i));
    for (std::size_t h = 0; h < horizon; ++h)
      for (std::size_t i = 0; i < nodes; ++i)
        target(s, h, i) =
            series(static_cast<Eigen::Index>(t0 + lookback + h), static_cast<Eigen::Index>(i));
  }
}

}  // namespace crc
