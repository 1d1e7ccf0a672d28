#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mchain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = mchain::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> summary(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mchain_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream truth(dir_ / "truth.csv");
    truth << "t,v_mag,v_angle,i_mag,i_angle\n";
    for (int k = 0; k <= 600; ++k) truth << k << ",1.0," << 0.01 * k << ",0.8,-5\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& body) {
    const fs::path p = dir_ / "run.json";
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

const char* kNullConfig = R"({
  "seed": 3, "truth_path": "truth.csv",
  "transformers": {"systematic": false},
  "scada": {"latency": {"constant": 0}, "buffer": "zero"}
})";

}  // namespace

TEST_F(CliTest, FitSingleComponentIsExact) {
  const auto r = run({"fit-gmm", "--k", "1", "--std", "0.01", "--mean", "0", "--eta", "0.1", "-o",
                      (dir_ / "g.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(summary(r.out)["status"], "ok");
  EXPECT_NE(slurp(dir_ / "g.json").find("0.01"), std::string::npos);
}

TEST_F(CliTest, FitInfeasibleExitsThree) {
  const auto r = run({"fit-gmm", "--k", "3", "--std", "0.01", "--mean", "0", "--eta", "1e-9",
                      "--max-iters", "10", "-o", (dir_ / "g.json").string()});
  EXPECT_EQ(r.code, 3);
  auto kv = summary(r.out);
  EXPECT_EQ(kv["status"], "failed");
  EXPECT_EQ(kv["iterations"], "10");
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, FitIsDeterministic) {
  const std::vector<std::string> base{"fit-gmm", "--k", "3", "--std", "0.01", "--mean", "0",
                                      "--eta", "0.05", "--seed", "7", "-o"};
  auto a = base;
  a.push_back((dir_ / "a.json").string());
  auto b = base;
  b.push_back((dir_ / "b.json").string());
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json"));
}

TEST_F(CliTest, BadArgumentsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"fit-gmm", "--k", "3"}).code, 2);
  EXPECT_EQ(run({"fit-gmm", "--k", "0", "--std", "0.01", "--eta", "0.1"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST_F(CliTest, HelpAndVersion) {
  auto r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
  r = run({"simulate-pmu", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--config"), std::string::npos);
}

TEST_F(CliTest, NullScadaSummary) {
  const auto cfg = write_config(kNullConfig);
  const auto r = run({"simulate-scada", "-c", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = summary(r.out);
  EXPECT_EQ(kv.at("discarded"), "0");
  EXPECT_EQ(kv.at("samples"), "301");
  for (const auto& [k, v] : kv) {
    if (k.ends_with("_std")) EXPECT_EQ(v, "0") << k;
  }
  EXPECT_TRUE(fs::exists(dir_ / "scada.csv"));
}

TEST_F(CliTest, SchemeOneWithoutHistoryExitsTwo) {
  const auto cfg = write_config(R"({"truth_path": "truth.csv", "scada": {"cn": {"scheme": "scheme1"}}})");
  const auto r = run({"simulate-scada", "-c", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("history_path"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingConfigFileExitsTwo) {
  EXPECT_EQ(run({"simulate-scada", "-c", (dir_ / "absent.json").string()}).code, 2);
}

TEST_F(CliTest, MalformedTruthExitsFour) {
  std::ofstream(dir_ / "truth.csv") << "t,v_mag,v_angle,i_mag,i_angle\n0,1,0,1,0\n0,1,0,1,0\n";
  const auto r = run({"simulate-scada", "-c", write_config(kNullConfig).string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, UncoveredHistoryExitsFiveWithStage) {
  std::ofstream(dir_ / "hist.csv") << "t,v,p,q\n0,1,1,1\n10,1,1,1\n";
  const auto cfg = write_config(R"({"truth_path": "truth.csv", "history_path": "hist.csv",
      "scada": {"cn": {"scheme": "scheme1"}}})");
  const auto r = run({"simulate-scada", "-c", cfg.string()});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("cn_scheme1"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnsupportedRateExitsTwo) {
  const auto cfg = write_config(R"({"truth_path": "truth.csv", "pmu": {"reporting_rate": 7}})");
  const auto r = run({"simulate-pmu", "-c", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("supported pairs"), std::string::npos) << r.err;
}

TEST_F(CliTest, GpsLossScenarioReportsFinalAngle) {
  const auto cfg = write_config(R"({"truth_path": "truth.csv", "transformers": {"systematic": false},
      "pmu": {"timing": {"gps_drift_us_per_s": 0.15, "loss_events": [{"start": 0, "duration": 600}]}}})");
  const auto r = run({"simulate-pmu", "-c", cfg.string(), "--format", "jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double final_deg = std::stod(summary(r.out).at("final_injected_angle_error_deg"));
  EXPECT_NEAR(final_deg, 1.94, 0.005 * 1.94);
  const double measured = std::stod(summary(r.out).at("final_angle_error_deg"));
  EXPECT_NEAR(measured, 1.94, 0.005 * 1.94);
}

TEST_F(CliTest, SeedDeterminesOutputs) {
  const auto cfg = write_config(R"({"truth_path": "truth.csv",
      "noise": {"vt_ratio": {"weights": [1], "means": [0], "stds": [0.001]}, "ied_v_std": 0.001},
      "scada": {"latency": {"weights": [1], "log_means": [-1], "log_stds": [1]},
                "cn": {"scheme": "scheme2", "v": {"weights": [1], "means": [0], "stds": [0.001]},
                       "p": {"weights": [1], "means": [0], "stds": [0.001]},
                       "q": {"weights": [1], "means": [0], "stds": [0.001]}}}})");
  const auto a = (dir_ / "a.csv").string();
  const auto b = (dir_ / "b.csv").string();
  const auto c = (dir_ / "c.csv").string();
  ASSERT_EQ(run({"simulate-scada", "-c", cfg.string(), "--seed", "5", "-o", a}).code, 0);
  ASSERT_EQ(run({"simulate-scada", "-c", cfg.string(), "--seed", "5", "-o", b}).code, 0);
  ASSERT_EQ(run({"simulate-scada", "-c", cfg.string(), "--seed", "6", "-o", c}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(CliTest, SimulateCnWritesSchedule) {
  const auto cfg = write_config(R"({"truth_path": "truth.csv",
      "scada": {"latency": {"weights": [1], "log_means": [-1], "log_stds": [1]}}})");
  const auto out = (dir_ / "sched.csv").string();
  const auto r = run({"simulate-cn", "-c", cfg.string(), "--samples", "100", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(summary(r.out).at("samples"), "100");
  EXPECT_EQ(slurp(out).substr(0, 7), "k,send_");
}

TEST_F(CliTest, MakeFilterPrintsTable) {
  const auto r = run({"make-filter", "--rate", "60"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k,W"), std::string::npos);
  EXPECT_EQ(run({"make-filter", "--rate", "7"}).code, 2);
}
