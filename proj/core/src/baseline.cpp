#include "crc/baseline.hpp"

#include "crc/error.hpp"
#include "crc/kvfile.hpp"
#include "crc/ridge.hpp"

namespace crc {

Tensor3 persistence(const Tensor3& history, std::size_t horizon) {
  const std::size_t B = history.dim(0), P = history.dim(1), N = history.dim(2);
  if (P == 0) throw ShapeMismatch("persistence needs at least one observed step");
  Tensor3 out(B, horizon, N);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t h = 0; h < horizon; ++h)
      for (std::size_t i = 0; i < N; ++i) out(b, h, i) = history(b, P - 1, i);
  return out;
}

Tensor3 seasonal_persistence(const Tensor3& history, std::size_t horizon, std::size_t period) {
  const std::size_t B = history.dim(0), P = history.dim(1), N = history.dim(2);
  if (period == 0 || period > P) throw ShapeMismatch("seasonal period must lie in [1, lookback]");
  Tensor3 out(B, horizon, N);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t h = 0; h < horizon; ++h)
      for (std::size_t i = 0; i < N; ++i) out(b, h, i) = history(b, P - period + (h % period), i);
  return out;
}

namespace {

Matrix lagged_design(const Tensor3& history, std::size_t node) {
  const std::size_t B = history.dim(0), P = history.dim(1);
  Matrix g(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(P + 1));
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t p = 0; p < P; ++p)
      g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(p)) = history(b, p, node);
    g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(P)) = 1.0;
  }
  return g;
}

}  // namespace

void LinearBaseline::fit(const Tensor3& history, const Tensor3& target) {
  if (history.dim(0) != target.dim(0) || history.dim(2) != target.dim(2)) {
    throw ShapeMismatch("history " + history.shape_string() + " vs target " + target.shape_string());
  }
  if (history.dim(0) == 0) throw InsufficientRows("linear baseline needs training windows");
  weights_.clear();
  for (std::size_t i = 0; i < history.dim(2); ++i) {
    const Matrix g = lagged_design(history, i);
    const double scale = std::max(1.0, (g.transpose() * g).diagonal().mean());
    weights_.push_back(solve_ridge(g, node_block(target, i), kJitter * scale, 1));
  }
}

Tensor3 LinearBaseline::predict(const Tensor3& history) const {
  if (!fitted()) throw MissingStage("linear baseline is not fitted");
  const std::size_t B = history.dim(0), N = history.dim(2);
  if (N != weights_.size() || history.dim(1) + 1 != static_cast<std::size_t>(weights_[0].rows())) {
    throw ShapeMismatch("history " + history.shape_string() + " does not match fitted baseline");
  }
  const std::size_t H = static_cast<std::size_t>(weights_[0].cols());
  Tensor3 out(B, H, N);
  for (std::size_t i = 0; i < N; ++i) {
    const Matrix pred = lagged_design(history, i) * weights_[i];
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t h = 0; h < H; ++h)
        out(b, h, i) = pred(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(h));
  }
  return out;
}

std::string BaselineSpec::name() const {
  switch (kind) {
    case BaselineKind::persistence: return "persistence";
    case BaselineKind::seasonal: return "seasonal:" + std::to_string(period);
    case BaselineKind::linear: return "linear";
  }
  return "linear";
}

BaselineSpec BaselineSpec::parse(const std::string& text) {
  BaselineSpec s;
  if (text == "persistence") s.kind = BaselineKind::persistence;
  else if (text == "linear") s.kind = BaselineKind::linear;
  else if (text.rfind("seasonal:", 0) == 0) {
    s.kind = BaselineKind::seasonal;
    const long long p = parse_int(text.substr(9), "seasonal period");
    if (p <= 0) throw ConfigError("seasonal period must be positive");
    s.period = static_cast<std::size_t>(p);
  } else {
    throw ConfigError("unknown baseline '" + text + "' (persistence | seasonal:<period> | linear)");
  }
  return s;
}

void attach_baseline(DatasetSplit& split, const BaselineSpec& spec) {
  const std::size_t H = split.train.target_or_throw().dim(1);
  switch (spec.kind) {
    case BaselineKind::persistence:
      for (auto* inst : {&split.train, &split.val, &split.test})
        inst->base_forecast = persistence(inst->history, H);
      break;
    case BaselineKind::seasonal:
      for (auto* inst : {&split.train, &split.val, &split.test})
        inst->base_forecast = seasonal_persistence(inst->history, H, spec.period);
      break;
    case BaselineKind::linear: {
      LinearBaseline lb;
      lb.fit(split.train.history, split.train.target_or_throw());
      for (auto* inst : {&split.train, &split.val, &split.test})
        inst->base_forecast = lb.predict(inst->history);
      break;
    }
  }
}

}  // namespace crc
