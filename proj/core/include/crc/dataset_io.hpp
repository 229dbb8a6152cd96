#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "crc/kvfile.hpp"
#include "crc/synthetic.hpp"
#include "crc/types.hpp"

namespace crc {

/// Ground-truth decomposition kept next to a synthetic dataset.
struct DatasetOracle {
  Tensor3 cross_train, cross_val, cross_test;
  Tensor3 noise_train, noise_val, noise_test;
};

/// On-disk dataset directory:
///   meta.kv              shape, split bounds, normalization, node names, baseline name
///   series.csv           the (normalized) series, one column per node
///   base_<split>.csv     baseline forecasts in the forecast layout
///   oracle_cross_<split>.csv / oracle_noise_<split>.csv   synthetic only
struct StoredDataset {
  DatasetSplit split;
  std::string source;    // "synthetic" or "csv"
  std::string baseline;  // baseline name
  std::optional<DatasetOracle> oracle;
};

void write_dataset(const std::filesystem::path& dir, const StoredDataset& data);
StoredDataset read_dataset(const std::filesystem::path& dir);

/// Wraps a generated synthetic dataset for storage.
StoredDataset stored_from_synthetic(const SyntheticDataset& ds);

/// Files of the dataset directory (relative names), for manifest hashing.
std::vector<std::string> dataset_files(const StoredDataset& data);

}  // namespace crc
