#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace sensorfault {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sensorfault");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sensorfault_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  void write_config() const {
    std::ofstream(dir_ / "cfg.json") << R"({"version":1,"synth":{"days":60,"event_count":14},"preprocess":{"training_days":20}})";
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"--modality", "air", "synth"}).code, 2);
  EXPECT_EQ(invoke({"detect", "--input", p("missing.csv"), "--node", "n1"}).code, 2);
}

TEST_F(CliTest, FullPipeline) {
  write_config();
  const std::string cfg = p("cfg.json");
  ASSERT_EQ(invoke({"--config", cfg, "--seed", "4", "--out", p("syn"), "synth"}).code, 0);
  for (auto f : {"series.csv", "events.csv", "precipitation.csv", "synth.config.json"}) EXPECT_TRUE(fs::exists(dir_ / "syn" / f)) << f;

  ASSERT_EQ(invoke({"--config", cfg, "--out", p("tr"), "train", "--input", p("syn/series.csv"), "--node", "n2", "--to-day", "20"}).code, 0);
  const auto model = nlohmann::json::parse(slurp(dir_ / "tr/model.json"));
  EXPECT_GT(model.at("sigma_train").get<double>(), 0.0);

  ASSERT_EQ(invoke({"--config", cfg, "--out", p("inj"), "inject", "--input", p("syn/series.csv"), "--node", "n2", "--kind",
                    "noise", "--noise-model", p("tr/model.json"), "--multiplier", "3", "--from-day", "20"})
                .code,
            0);
  ASSERT_EQ(invoke({"--out", p("det"), "detect", "--input", p("inj/faulted.csv"), "--node", "n2", "--detector", "noise",
                    "--model", p("tr/model.json"), "--multiplier", "1"})
                .code,
            0);
  const auto r = invoke({"--out", p("ev"), "evaluate", "--input", p("inj/faulted.csv"), "--node", "n2", "--detections",
                         p("det/detections.csv"), "--precipitation", p("syn/precipitation.csv"), "--labels", p("inj/labels.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "ev/report.json"));
  EXPECT_TRUE(report.contains("mu"));
  EXPECT_EQ(report.at("counts").at("noise_bursts_missed").at("total").get<int>() > 0, true);
}

TEST_F(CliTest, LlseTrainAndDetect) {
  write_config();
  const std::string cfg = p("cfg.json");
  ASSERT_EQ(invoke({"--config", cfg, "--out", p("syn"), "synth"}).code, 0);
  const auto t = invoke({"--config", cfg, "--modality", "soil_moisture", "--out", p("m"), "train", "--input", p("syn/series.csv"),
                         "--node", "n1", "--detector", "llse", "--to-day", "20"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto model = nlohmann::json::parse(slurp(dir_ / "m/model.json"));
  EXPECT_EQ(model.at("target"), "n1");
  EXPECT_EQ(model.at("neighbors").size(), 2u);
  EXPECT_EQ(invoke({"--modality", "soil_moisture", "--out", p("d"), "detect", "--input", p("syn/series.csv"), "--node", "n1",
                    "--detector", "llse", "--model", p("m/model.json")})
                .code,
            0);
  // A model for n1 does not apply to n2.
  const auto mismatch = invoke({"--modality", "soil_moisture", "--out", p("d2"), "detect", "--input", p("syn/series.csv"),
                                "--node", "n2", "--detector", "llse", "--model", p("m/model.json")});
  EXPECT_EQ(mismatch.code, 3);
  EXPECT_FALSE(fs::exists(dir_ / "d2"));
}

TEST_F(CliTest, SweepTwiceIsByteIdentical) {
  write_config();
  for (auto out : {"a", "b"}) {
    ASSERT_EQ(invoke({"--config", p("cfg.json"), "--out", p(out), "sweep", "--detector", "short", "--grid", "10,20,30"}).code, 0);
  }
  for (auto f : {"sweep.csv", "sweep_report.json", "sweep.config.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  const auto csv = slurp(dir_ / "a/sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST_F(CliTest, ErrorCategoriesMapToExitCodes) {
  write_config();
  EXPECT_EQ(invoke({"--config", p("cfg.json"), "--out", p("s"), "sweep", "--grid", "20,10"}).code, 2);
  std::ofstream(dir_ / "broken.json") << "{not json";
  EXPECT_EQ(invoke({"--config", p("broken.json"), "sweep"}).code, 3);
  std::ofstream(dir_ / "bad.csv") << "timestamp,node_id,modality,value\nyesterday,n1,box_temp,1\n";
  EXPECT_EQ(invoke({"--out", p("d"), "detect", "--input", p("bad.csv"), "--node", "n1", "--delta", "1"}).code, 3);
  EXPECT_EQ(invoke({"--out", p("d"), "train", "--input", p("bad.csv"), "--node", "n1", "--detector", "noise"}).code, 3);
}

TEST_F(CliTest, FailedCommitLeavesNoPartialFiles) {
  write_config();
  ASSERT_EQ(invoke({"--config", p("cfg.json"), "--out", p("syn"), "synth"}).code, 0);
  // A directory squatting on the second output name makes the rename fail after the first file landed.
  fs::create_directories(dir_ / "o" / "events.csv" / "x");
  const auto r = invoke({"--config", p("cfg.json"), "--out", p("o"), "synth"});
  EXPECT_EQ(r.code, 3);
  std::vector<std::string> left;
  for (const auto& e : fs::directory_iterator(dir_ / "o")) left.push_back(e.path().filename().string());
  EXPECT_EQ(left, std::vector<std::string>{"events.csv"});
}

}  // namespace
}  // namespace sensorfault
