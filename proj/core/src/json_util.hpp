#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "crc/error.hpp"
#include "crc/tensor.hpp"

namespace crc::json_util {

using Json = nlohmann::ordered_json;

/// Row-major nested arrays.
inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

/// Parses `text` and checks its `format` field.
inline Json parse(std::string_view text, const std::string& format) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(format + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != format)
    throw ParseError("expected a " + format + " document");
  if (!j.contains("version") || j["version"] != 1) throw ParseError(format + ": unsupported version");
  return j;
}

}  // namespace crc::json_util
