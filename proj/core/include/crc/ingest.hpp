#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crc/baseline.hpp"
#include "crc/csv.hpp"
#include "crc/kvfile.hpp"
#include "crc/types.hpp"

namespace crc {

enum class NormalizationKind { none, zscore };

struct CsvDatasetSpec {
  std::filesystem::path path;
  std::string timestamp_column = "date";
  std::vector<std::string> value_columns;  // empty = every non-timestamp column
  NormalizationKind normalization = NormalizationKind::zscore;

  KvFile to_kv() const;
  static CsvDatasetSpec from_kv(const KvFile& kv);
};

inline constexpr double kNormalizationStdFloor = 1e-8;

/// Loads an ETT-style CSV into stride-1 chronological windows. Z-score
/// statistics (std floored at 1e-8) come from the training rows only.
/// Throws ParseError (row/column reported) or InsufficientRows.
DatasetSplit load_csv(const CsvDatasetSpec& spec, const Shape& shape, const SplitFractions& fractions,
                      const BaselineSpec& baseline = {});

/// As load_csv but from an already parsed table.
DatasetSplit load_table(const CsvTable& table, const CsvDatasetSpec& spec, const Shape& shape,
                        const SplitFractions& fractions, const BaselineSpec& baseline = {});

/// Windows a raw [T x N] series into a split; applies `norm` when enabled.
DatasetSplit window_series(Matrix series, const Shape& shape, const SplitFractions& fractions,
                           bool zscore);

}  // namespace crc
