#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "crc/tensor.hpp"

namespace crc {

/// Comma-separated table with a mandatory header row. No quoting: fields
/// may not contain commas (true for ETT-style benchmark files).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& origin = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Forecast layout: header `sample,horizon,node,value`, one row per element
/// of a [B x H x N] tensor in sample-major order.
std::string forecast_csv(const Tensor3& values);
void write_forecast_csv(const std::filesystem::path& path, const Tensor3& values);
/// Reads the forecast layout back; every (sample, horizon, node) cell must
/// appear exactly once.
Tensor3 read_forecast_csv(const std::filesystem::path& path);
Tensor3 parse_forecast_csv(std::string_view text, const std::string& origin = "<memory>");

/// Writes a real matrix as CSV with an optional header row.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace crc
