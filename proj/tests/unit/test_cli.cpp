#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "crc/csv.hpp"
#include "crc/safety.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = CRC_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path workspace(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("crc_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string out(const fs::path& ws) { return " --out " + ws.string(); }

// Small seeded workspace with every stage run once.
fs::path prepared(const std::string& name) {
  const fs::path ws = workspace(name);
  EXPECT_EQ(run("synth --nodes 5 --length 700 --lookback 16 --horizon 4 --seed 3" + out(ws)), 0);
  EXPECT_EQ(run("graph --knn-k 2" + out(ws)), 0);
  EXPECT_EQ(run("fit" + out(ws)), 0);
  EXPECT_EQ(run("calibrate" + out(ws)), 0);
  EXPECT_EQ(run("correct" + out(ws)), 0);
  EXPECT_EQ(run("evaluate" + out(ws)), 0);
  EXPECT_EQ(run("certify" + out(ws)), 0);
  return ws;
}

TEST(Cli, FullPipelineEmitsEveryArtifact) {
  const fs::path ws = prepared("full");
  for (const char* f : {"config.kv", "graph.csv", "checkpoint.json", "policy.json", "corrected_val.csv",
                        "corrected_test.csv", "report_val.json", "report_test.json", "pairs_test.csv",
                        "certificate.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(ws / f)) << f;
  EXPECT_EQ(run("influence --times 0,3" + out(ws)), 0);
  EXPECT_TRUE(fs::exists(ws / "influence" / "test_3.csv"));
  const auto cert = crc::SafetyCertificate::read(ws / "certificate.json");
  EXPECT_EQ(cert.m, 5u * 4u);
  fs::remove_all(ws);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path ws = prepared("rerun");
  const char* files[] = {"graph.csv", "checkpoint.json", "policy.json", "corrected_test.csv",
                         "report_test.json", "certificate.json"};
  std::vector<std::string> before;
  for (const char* f : files) before.push_back(crc::read_text(ws / f));
  for (const char* stage : {"graph", "fit", "calibrate", "correct", "evaluate", "certify"})
    EXPECT_EQ(run(std::string(stage) + out(ws)), 0) << stage;
  for (std::size_t k = 0; k < std::size(files); ++k) EXPECT_EQ(crc::read_text(ws / files[k]), before[k]) << files[k];
  fs::remove_all(ws);
}

TEST(Cli, TamperedInputIsStale) {
  const fs::path ws = prepared("tamper");
  crc::write_text(ws / "policy.json", crc::read_text(ws / "policy.json") + " ");
  EXPECT_EQ(run("correct" + out(ws)), 4);
  fs::remove_all(ws);
}

TEST(Cli, ConfigChangeInvalidatesArtifacts) {
  const fs::path ws = prepared("config");
  EXPECT_EQ(run("calibrate --epsilon 0.02" + out(ws)), 4);
  fs::remove_all(ws);
}

TEST(Cli, MissingStageReported) {
  const fs::path ws = workspace("missing");
  EXPECT_EQ(run("graph" + out(ws)), 4);
  EXPECT_EQ(run("synth --nodes 4 --length 600 --lookback 16 --horizon 4" + out(ws)), 0);
  EXPECT_EQ(run("calibrate --knn-k 2" + out(ws)), 4);
  fs::remove_all(ws);
}

TEST(Cli, BadArgumentsAreInputErrors) {
  const fs::path ws = workspace("args");
  EXPECT_EQ(run("frobnicate"), 3);
  EXPECT_EQ(run("synth --quantile-q 1.5" + out(ws)), 3);
  EXPECT_EQ(run("synth --nodes 4 --length 600 --lookback 16 --horizon 4 --noise cauchy" + out(ws)), 3);
  fs::remove_all(ws);
}

TEST(Cli, RevertedPolicyCopiesBaseBytes) {
  // Epsilon above any attainable improvement forces the revert path.
  const fs::path ws = workspace("revert");
  ASSERT_EQ(run("synth --nodes 4 --length 600 --lookback 16 --horizon 4 --epsilon 2" + out(ws)), 0);
  EXPECT_EQ(run("graph --knn-k 2" + out(ws)), 0);
  EXPECT_EQ(run("fit" + out(ws)), 0);
  EXPECT_EQ(run("calibrate" + out(ws)), 2);
  EXPECT_EQ(run("correct" + out(ws)), 2);
  EXPECT_EQ(crc::read_text(ws / "corrected_test.csv"), crc::read_text(ws / "dataset" / "base_test.csv"));
  EXPECT_EQ(crc::read_text(ws / "corrected_val.csv"), crc::read_text(ws / "dataset" / "base_val.csv"));
  EXPECT_EQ(run("evaluate" + out(ws)), 0);
  EXPECT_EQ(run("certify" + out(ws)), 2);
  fs::remove_all(ws);
}

TEST(Cli, ExternalBaseForecast) {
  const fs::path ws = prepared("external");
  const fs::path ext = ws / "external_test.csv";
  fs::copy_file(ws / "dataset" / "base_test.csv", ext);
  EXPECT_EQ(run("correct --split test --base " + ext.string() + out(ws)), 0);
  EXPECT_EQ(run("evaluate" + out(ws)), 0);
  crc::write_text(ext, "sample,horizon,node,value\n0,0,0,1\n");
  EXPECT_EQ(run("correct --split test --base " + ext.string() + out(ws)), 5);
  fs::remove_all(ws);
}

TEST(Cli, IngestCsv) {
  const fs::path ws = workspace("ingest");
  fs::create_directories(ws);
  std::string text = "date,a,b,c\n";
  for (int t = 0; t < 400; ++t) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "2020-01-01 %05d", t);
    text += std::string(stamp) + "," + std::to_string(std::sin(0.2 * t)) + "," + std::to_string(std::cos(0.1 * t)) +
            "," + std::to_string(0.01 * t) + "\n";
  }
  crc::write_text(ws / "in.csv", text);
  EXPECT_EQ(run("ingest --csv " + (ws / "in.csv").string() + " --lookback 16 --horizon 4 --baseline persistence" +
                out(ws)),
            0);
  EXPECT_EQ(run("run --knn-k 1" + out(ws)) <= 2, true);
  EXPECT_TRUE(fs::exists(ws / "certificate.json"));
  fs::remove_all(ws);
}

}  // namespace
