#include "throttle/cli.hpp"

#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/slowdown_oracle.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(THROTTLE_SOURCE_DIR) / "scenarios";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "throttlectl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = throttle::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string six(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("throttlectl_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path out(const std::string& name = "out") const { return dir_ / name; }

  fs::path dir_;
};

TEST_F(Cli, SimulateBenignOnlyReportsZero) {
  const auto r = cli({"simulate", "--scenario", (kScenarios / "benign_only.ini").string(), "--out",
                      out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(slurp(out() / "slowdown.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "process,progress_with,progress_without,slowdown_pct");
  EXPECT_EQ(rows[1], "svc,500.000000,500.000000,0.000000");
  EXPECT_EQ(lines_of(slurp(out() / "log.csv")).size(), 51u);
}

TEST_F(Cli, SimulateMissingScenarioIsConfigError) {
  const auto r = cli({"simulate", "--scenario", (dir_ / "nope.ini").string(), "--out",
                      out().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.ini"), std::string::npos);
}

TEST_F(Cli, SimulateInvalidScenarioIsConfigError) {
  const auto bad = write("bad.ini", "[scenario]\nepochs = 3\nn_star = 0\n");
  EXPECT_EQ(cli({"simulate", "--scenario", bad.string(), "--out", out().string()}).code, 2);
}

TEST_F(Cli, SimulateAllMaliciousMatchesClosedForm) {
  const auto r = cli({"simulate", "--scenario", (kScenarios / "worked_all_malicious.ini").string(),
                      "--out", out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto expected = oracle::additive_cpu_progress(std::vector<bool>(14, true), 15, 15, 0.1, 0.01);
  const auto rows = lines_of(slurp(out() / "slowdown.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], "attack," + six(expected.with_response) + "," +
                         six(expected.without_response) + "," + six(expected.slowdown_pct));
  EXPECT_EQ(rows[1], "attack,3.110000,15.000000,79.266667");
}

TEST_F(Cli, SimulateIsByteDeterministic) {
  const auto scenario = (kScenarios / "annotated.ini").string();
  ASSERT_EQ(cli({"simulate", "--scenario", scenario, "--out", out("a").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--scenario", scenario, "--out", out("b").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--scenario", scenario, "--out", out("c").string(), "--seed", "77"})
                .code,
            0);
  EXPECT_EQ(slurp(out("a") / "log.csv"), slurp(out("b") / "log.csv"));
  EXPECT_EQ(slurp(out("a") / "slowdown.csv"), slurp(out("b") / "slowdown.csv"));
  EXPECT_NE(slurp(out("a") / "log.csv"), slurp(out("c") / "log.csv"));
}

TEST_F(Cli, PlanXgboostF1) {
  const auto r = cli({"plan", "--curve", (kScenarios / "curves" / "xgboost.csv").string(),
                      "--f1", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "23 measurements");
  EXPECT_EQ(rows[1], "2.3s at 100 ms per epoch");
}

TEST_F(Cli, PlanFprAndEpochLength) {
  const auto r = cli({"plan", "--curve", (kScenarios / "curves" / "xgboost.csv").string(),
                      "--fpr", "0.10", "--epoch-ms", "150"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out)[0], "50 measurements");
  EXPECT_EQ(lines_of(r.out)[1], "7.5s at 150 ms per epoch");
}

TEST_F(Cli, PlanUnreachable) {
  const auto r = cli({"plan", "--curve", (kScenarios / "curves" / "xgboost.csv").string(),
                      "--f1", "0.99"});
  EXPECT_EQ(r.code, 4);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, PlanInterpolates) {
  const auto r = cli({"plan", "--curve", (kScenarios / "curves" / "small_ann.csv").string(),
                      "--f1", "0.75"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out)[0], "40 measurements");
}

TEST_F(Cli, PlanArgumentErrors) {
  const auto curve = (kScenarios / "curves" / "xgboost.csv").string();
  EXPECT_EQ(cli({"plan", "--curve", curve}).code, 2);
  EXPECT_EQ(cli({"plan", "--curve", curve, "--f1", "0.9", "--fpr", "0.1"}).code, 2);
  EXPECT_EQ(cli({"plan", "--curve", curve, "--f1", "1.5"}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, ReplayAllBenignTrace) {
  const auto r = cli({"replay", "--trace", (kScenarios / "traces" / "all_benign.csv").string(),
                      "--scenario", (kScenarios / "worked_recovery.ini").string(), "--out",
                      out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(slurp(out() / "slowdown.csv"))[1], "attack,15.000000,15.000000,0.000000");
}

TEST_F(Cli, ReplayRecoveryTraceMatchesClosedForm) {
  const auto r = cli({"replay", "--trace", (kScenarios / "traces" / "recovery.csv").string(),
                      "--scenario", (kScenarios / "worked_all_malicious.ini").string(), "--out",
                      out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<bool> pattern(14, false);
  for (int i = 0; i < 5; ++i) pattern[i] = true;
  const auto expected = oracle::additive_cpu_progress(pattern, 15, 15, 0.1, 0.01);
  const auto rows = lines_of(slurp(out() / "slowdown.csv"));
  EXPECT_EQ(rows[1], "attack," + six(expected.with_response) + ",15.000000," +
                         six(expected.slowdown_pct));
  EXPECT_EQ(rows[1], "attack,10.050000,15.000000,33.000000");

  const auto log = lines_of(slurp(out() / "log.csv"));
  ASSERT_EQ(log.size(), 16u);
  for (std::size_t e = 0; e < 15; ++e) {
    const auto& row = log[e + 1];
    std::vector<std::string> cells;
    std::istringstream in(row);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 13u) << row;
    EXPECT_EQ(cells[7], six(expected.shares[e])) << "epoch " << e;
  }
}

TEST_F(Cli, ReplayMalformedHeader) {
  const auto trace = write("t.csv", "epoch,pid,verdict\n1,attack,malicious\n");
  EXPECT_EQ(cli({"replay", "--trace", trace.string(), "--scenario",
                 (kScenarios / "worked_recovery.ini").string(), "--out", out().string()})
                .code,
            2);
}

TEST_F(Cli, ReplayShortTrace) {
  std::string text = "epoch,process,verdict\n";
  for (int e = 1; e <= 9; ++e) text += std::to_string(e) + ",attack,benign\n";
  const auto trace = write("t.csv", text);
  const auto r = cli({"replay", "--trace", trace.string(), "--scenario",
                      (kScenarios / "worked_recovery.ini").string(), "--out", out().string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(out() / "log.csv"));
}

TEST_F(Cli, ReplayTraceWithoutProcess) {
  const auto trace = write("t.csv", "epoch,process,verdict\n1,other,benign\n");
  EXPECT_EQ(cli({"replay", "--trace", trace.string(), "--scenario",
                 (kScenarios / "worked_recovery.ini").string(), "--out", out().string()})
                .code,
            3);
}

TEST_F(Cli, SuperviseAllMaliciousCallLog) {
  const auto r = cli({"supervise", "--fake-adapter", "--scenario",
                      (kScenarios / "supervise_all_malicious.ini").string(), "--out",
                      out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string rest = " mem=1.000000 net=1.000000 fs=1.000000";
  const std::vector<std::string> expected = {
      "seq,handle,call,args",
      "1,1,attach,pid=1000",
      "2,1,apply_shares,cpu=0.900000" + rest,
      "3,1,apply_shares,cpu=0.700000" + rest,
      "4,1,apply_shares,cpu=0.400000" + rest,
      "5,1,apply_shares,cpu=0.010000" + rest,
      "6,1,terminate,",
  };
  EXPECT_EQ(lines_of(slurp(out() / "adapter_log.csv")), expected);
  const auto log = lines_of(slurp(out() / "log.csv"));
  EXPECT_NE(log.back().find(",terminated,"), std::string::npos) << log.back();
}

TEST_F(Cli, SuperviseRecoveryTraceRestoresShares) {
  const auto r = cli({"supervise", "--fake-adapter", "--scenario",
                      (kScenarios / "supervise_recovery.ini").string(), "--out", out().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> cpu;
  for (const auto& line : lines_of(slurp(out() / "adapter_log.csv"))) {
    const auto at = line.find("apply_shares,cpu=");
    if (at != std::string::npos) cpu.push_back(line.substr(at + 17, 8));
  }
  // Shares move on epochs 1-4 and 6-9; epoch 5 is already at the floor.
  EXPECT_EQ(cpu, (std::vector<std::string>{"0.900000", "0.700000", "0.400000", "0.010000",
                                           "0.110000", "0.310000", "0.610000", "1.000000"}));
}

TEST_F(Cli, SuperviseImmediateTerminate) {
  const auto scenario = write("s.ini",
                              "[scenario]\nepochs = 4\nn_star = 1\n"
                              "[detector.d]\nkind = stochastic\ntpr = 1.0\n"
                              "[process.p]\ncpu = proportional\ndetector = d\n");
  ASSERT_EQ(cli({"supervise", "--fake-adapter", "--scenario", scenario.string(), "--out",
                 out().string()})
                .code,
            0);
  std::size_t terminates = 0;
  for (const auto& line : lines_of(slurp(out() / "adapter_log.csv")))
    terminates += line.find(",terminate,") != std::string::npos;
  EXPECT_EQ(terminates, 1u);
}

TEST_F(Cli, SuperviseBenignOnlyNeverApplies) {
  ASSERT_EQ(cli({"supervise", "--fake-adapter", "--scenario",
                 (kScenarios / "benign_only.ini").string(), "--out", out().string()})
                .code,
            0);
  const auto rows = lines_of(slurp(out() / "adapter_log.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], "1,1,attach,pid=1000");
}

TEST_F(Cli, SuperviseNeedsAnAdapter) {
  EXPECT_EQ(cli({"supervise", "--scenario", (kScenarios / "benign_only.ini").string(), "--out",
                 out().string()})
                .code,
            2);
}

}  // namespace
