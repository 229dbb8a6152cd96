#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crc {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& context);
long long parse_int(std::string_view text, const std::string& context);
std::uint64_t parse_uint(std::string_view text, const std::string& context);

/// Flat `key = value` text file. Keys are lowercase snake case; `#` starts a
/// comment line. Insertion order is kept so written files are stable.
class KvFile {
 public:
  static KvFile parse(std::string_view text, const std::string& origin = "<memory>");
  static KvFile read(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }

  bool contains(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Throws ConfigError naming the first key outside `allowed`.
  void require_known_keys(const std::set<std::string>& allowed) const;

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_;
};

bool is_snake_case_key(std::string_view key);

}  // namespace crc
