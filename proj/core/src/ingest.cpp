#include "crc/ingest.hpp"

#include <cmath>
#include <sstream>

#include "crc/error.hpp"

namespace crc {

namespace {

bool try_number(const std::string& s, double& out) {
  try {
    out = parse_double(s, "");
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

// Timestamps compare numerically when every one parses as a number and
// lexicographically otherwise (ISO-8601 strings order correctly that way).
void check_monotone(const CsvTable& t, std::size_t col, const std::string& origin) {
  bool numeric = true;
  std::vector<double> nums(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size() && numeric; ++r) numeric = try_number(t.rows[r][col], nums[r]);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const bool ordered = numeric ? nums[r] > nums[r - 1] : t.rows[r][col] > t.rows[r - 1][col];
    if (!ordered) {
      throw ParseError(origin + ": row " + std::to_string(r + 2) + ", column '" + t.header[col] +
                       "': timestamp '" + t.rows[r][col] + "' does not follow '" + t.rows[r - 1][col] + "'");
    }
  }
}

}  // namespace

KvFile CsvDatasetSpec::to_kv() const {
  KvFile kv;
  kv.set("path", path.string());
  kv.set("timestamp_column", timestamp_column);
  std::string cols;
  for (std::size_t i = 0; i < value_columns.size(); ++i) cols += (i ? "," : "") + value_columns[i];
  kv.set("value_columns", cols);
  kv.set("normalization", std::string(normalization == NormalizationKind::zscore ? "zscore" : "none"));
  return kv;
}

CsvDatasetSpec CsvDatasetSpec::from_kv(const KvFile& kv) {
  CsvDatasetSpec s;
  s.path = kv.get("path");
  if (kv.contains("timestamp_column")) s.timestamp_column = kv.get("timestamp_column");
  if (kv.contains("value_columns")) {
    std::stringstream ss(kv.get("value_columns"));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) s.value_columns.push_back(item);
  }
  if (kv.contains("normalization")) {
    const auto& n = kv.get("normalization");
    if (n == "zscore") s.normalization = NormalizationKind::zscore;
    else if (n == "none") s.normalization = NormalizationKind::none;
    else throw ConfigError("normalization must be zscore or none");
  }
  return s;
}

DatasetSplit window_series(Matrix series, const Shape& shape, const SplitFractions& fractions,
                           bool zscore) {
  DatasetSplit split;
  const auto rows = static_cast<std::size_t>(series.rows());
  split.bounds = make_bounds(rows, fractions, shape.lookback, shape.horizon);
  const auto N = static_cast<std::size_t>(series.cols());
  split.normalization.enabled = zscore;
  if (zscore) {
    const Eigen::Index n_train = static_cast<Eigen::Index>(split.bounds.train_end - split.bounds.train_begin);
    const Matrix train = series.topRows(n_train);
    for (std::size_t i = 0; i < N; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      const double mu = train.col(c).mean();
      const double sd = std::max(std::sqrt((train.col(c).array() - mu).square().mean()), kNormalizationStdFloor);
      split.normalization.mean.push_back(mu);
      split.normalization.scale.push_back(sd);
      series.col(c) = (series.col(c).array() - mu) / sd;
    }
  }
  split.series = std::move(series);
  const auto& b = split.bounds;
  extract_windows(split.series, b.train_begin, b.train_end, shape.lookback, shape.horizon,
                  split.train.history, split.train.target.emplace());
  extract_windows(split.series, b.val_begin, b.val_end, shape.lookback, shape.horizon,
                  split.val.history, split.val.target.emplace());
  extract_windows(split.series, b.test_begin, b.test_end, shape.lookback, shape.horizon,
                  split.test.history, split.test.target.emplace());
  return split;
}

DatasetSplit load_table(const CsvTable& t, const CsvDatasetSpec& spec, const Shape& shape,
                        const SplitFractions& fractions, const BaselineSpec& baseline) {
  const std::string origin = spec.path.string();
  const std::size_t ts = t.column(spec.timestamp_column);
  std::vector<std::string> names = spec.value_columns;
  if (names.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (c != ts) names.push_back(t.header[c]);
  }
  if (names.size() < 2) throw ParseError(origin + ": need at least 2 value columns");
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(t.column(n));
  check_monotone(t, ts, origin);
  Matrix series(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string where = origin + ": row " + std::to_string(r + 2) + ", column '" + names[c] + "'";
      const double v = parse_double(t.rows[r][cols[c]], where);
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
      series(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  DatasetSplit split = window_series(std::move(series), shape, fractions,
                                     spec.normalization == NormalizationKind::zscore);
  split.node_names = names;
  attach_baseline(split, baseline);
  return split;
}

DatasetSplit load_csv(const CsvDatasetSpec& spec, const Shape& shape, const SplitFractions& fractions,
                      const BaselineSpec& baseline) {
  return load_table(read_csv(spec.path), spec, shape, fractions, baseline);
}

}  // namespace crc
