#include "crc/csv.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "crc/error.hpp"
#include "crc/kvfile.hpp"

namespace crc {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("column '" + name + "' not in header");
}

CsvTable parse_csv(std::string_view text, const std::string& origin) {
  CsvTable t;
  std::size_t pos = 0, line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(origin + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError(origin + ": missing header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

std::string forecast_csv(const Tensor3& values) {
  std::string out = "sample,horizon,node,value\n";
  out.reserve(values.size() * 24);
  for (std::size_t b = 0; b < values.dim(0); ++b)
    for (std::size_t h = 0; h < values.dim(1); ++h)
      for (std::size_t i = 0; i < values.dim(2); ++i) {
        out += std::to_string(b);
        out += ',';
        out += std::to_string(h);
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += format_double(values(b, h, i));
        out += '\n';
      }
  return out;
}

void write_forecast_csv(const std::filesystem::path& path, const Tensor3& values) {
  write_text(path, forecast_csv(values));
}

Tensor3 parse_forecast_csv(std::string_view text, const std::string& origin) {
  const CsvTable t = parse_csv(text, origin);
  const std::size_t cs = t.column("sample"), ch = t.column("horizon"), cn = t.column("node"),
                    cv = t.column("value");
  std::size_t B = 0, H = 0, N = 0;
  std::vector<std::array<long long, 3>> idx;
  idx.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = origin + ": row " + std::to_string(r + 2);
    const long long s = parse_int(t.rows[r][cs], where), h = parse_int(t.rows[r][ch], where),
                    n = parse_int(t.rows[r][cn], where);
    if (s < 0 || h < 0 || n < 0) throw ParseError(where + ": negative index");
    idx.push_back({s, h, n});
    B = std::max(B, static_cast<std::size_t>(s) + 1);
    H = std::max(H, static_cast<std::size_t>(h) + 1);
    N = std::max(N, static_cast<std::size_t>(n) + 1);
  }
  if (B * H * N != t.rows.size()) {
    throw ParseError(origin + ": " + std::to_string(t.rows.size()) + " rows do not tile a " +
                     std::to_string(B) + "x" + std::to_string(H) + "x" + std::to_string(N) + " grid");
  }
  Tensor3 out(B, H, N);
  std::vector<char> seen(B * H * N, 0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto [s, h, n] = idx[r];
    const std::size_t flat = (static_cast<std::size_t>(s) * H + static_cast<std::size_t>(h)) * N +
                             static_cast<std::size_t>(n);
    if (seen[flat]) throw ParseError(origin + ": duplicate cell at row " + std::to_string(r + 2));
    seen[flat] = 1;
    out(static_cast<std::size_t>(s), static_cast<std::size_t>(h), static_cast<std::size_t>(n)) =
        parse_double(t.rows[r][cv], origin + ": row " + std::to_string(r + 2));
  }
  return out;
}

Tensor3 read_forecast_csv(const std::filesystem::path& path) {
  return parse_forecast_csv(read_text(path), path.string());
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  if (!header.empty()) out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_text(path, out);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingStage("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace crc
