#include "crc/manifest.hpp"

#include <algorithm>

#include "crc/csv.hpp"
#include "crc/error.hpp"
#include "crc/hash.hpp"
#include "json_util.hpp"

namespace crc {

using json_util::Json;

PipelineManifest PipelineManifest::load(const std::filesystem::path& root) {
  PipelineManifest m;
  const auto path = root / kFileName;
  if (!std::filesystem::exists(path)) return m;
  const Json j = json_util::parse(read_text(path), "crc-manifest");
  try {
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.stage = s.at("stage").get<std::string>();
      r.inputs = s.at("inputs").get<std::map<std::string, std::string>>();
      r.outputs = s.at("outputs").get<std::map<std::string, std::string>>();
      r.seed = s.at("seed").get<std::uint64_t>();
      r.config_hash = s.at("config_hash").get<std::string>();
      r.wall_seconds = s.at("wall_seconds").get<double>();
      m.stages_.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return m;
}

void PipelineManifest::save(const std::filesystem::path& root) const {
  Json j;
  j["format"] = "crc-manifest";
  j["version"] = 1;
  Json stages = Json::array();
  for (const auto& r : stages_) {
    Json s;
    s["stage"] = r.stage;
    s["inputs"] = r.inputs;
    s["outputs"] = r.outputs;
    s["seed"] = r.seed;
    s["config_hash"] = r.config_hash;
    s["wall_seconds"] = r.wall_seconds;
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  write_text(root / kFileName, j.dump(2) + "\n");
}

const StageRecord* PipelineManifest::find(const std::string& stage) const {
  for (const auto& r : stages_)
    if (r.stage == stage) return &r;
  return nullptr;
}

const StageRecord& PipelineManifest::require(const std::string& stage) const {
  const StageRecord* r = find(stage);
  if (!r) throw MissingStage("stage '" + stage + "' has not been run in this workspace");
  return *r;
}

std::map<std::string, std::string> PipelineManifest::verify_inputs(const std::filesystem::path& root,
                                                                   const std::vector<std::string>& paths) const {
  std::map<std::string, std::string> out;
  for (const auto& p : paths) {
    const StageRecord* producer = nullptr;
    for (const auto& r : stages_)
      if (r.outputs.count(p)) producer = &r;
    if (!producer) throw MissingStage("no recorded stage produced '" + p + "'");
    if (!std::filesystem::exists(root / p)) throw MissingStage("'" + p + "' recorded by stage '" + producer->stage + "' is missing");
    const std::string now = hash_file(root / p);
    if (now != producer->outputs.at(p))
      throw StaleInput("'" + p + "' changed since stage '" + producer->stage + "' wrote it (recorded " +
                       producer->outputs.at(p) + ", found " + now + ")");
    out[p] = now;
  }
  return out;
}

void PipelineManifest::record(StageRecord record) {
  stages_.erase(std::remove_if(stages_.begin(), stages_.end(),
                               [&](const StageRecord& r) { return r.stage == record.stage; }),
                stages_.end());
  stages_.push_back(std::move(record));
}

std::map<std::string, std::string> hash_outputs(const std::filesystem::path& root,
                                                const std::vector<std::string>& paths) {
  std::map<std::string, std::string> out;
  for (const auto& p : paths) out[p] = hash_file(root / p);
  return out;
}

}  // namespace crc
