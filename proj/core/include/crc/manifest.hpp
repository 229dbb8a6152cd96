#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace crc {

/// One executed pipeline stage. Paths are relative to the workspace root.
struct StageRecord {
  std::string stage;
  std::map<std::string, std::string> inputs;   // path -> content hash at run time
  std::map<std::string, std::string> outputs;  // path -> content hash written
  std::uint64_t seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;
};

/// Ordered record of stages run in a workspace (`manifest.json`). Each stage
/// checks that its inputs still hash to what the producing stage wrote.
class PipelineManifest {
 public:
  static constexpr const char* kFileName = "manifest.json";

  /// Loads `<root>/manifest.json`, or an empty manifest when absent.
  static PipelineManifest load(const std::filesystem::path& root);
  void save(const std::filesystem::path& root) const;

  const std::vector<StageRecord>& stages() const { return stages_; }
  const StageRecord* find(const std::string& stage) const;

  /// Throws MissingStage when `stage` has not been recorded.
  const StageRecord& require(const std::string& stage) const;

  /// For each relative path: the latest stage listing it as an output must
  /// exist (MissingStage) and its recorded hash must equal the file's current
  /// hash (StaleInput). Returns path -> current hash.
  std::map<std::string, std::string> verify_inputs(const std::filesystem::path& root,
                                                   const std::vector<std::string>& paths) const;

  /// Replaces any earlier record of the same stage and appends `record`.
  void record(StageRecord record);

 private:
  std::vector<StageRecord> stages_;
};

/// Hashes each relative path under `root`.
std::map<std::string, std::string> hash_outputs(const std::filesystem::path& root,
                                                const std::vector<std::string>& paths);

}  // namespace crc
