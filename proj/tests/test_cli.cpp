#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "epitrigger/cli.hpp"

using namespace epitrigger;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("epitrigger_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "epitrigger");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli_main(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kSweepAxes =
    "sweep.axis1.target = beta_i\nsweep.axis1.min = 0.5\nsweep.axis1.max = 2\nsweep.axis1.points = 3\n";

}  // namespace

TEST_F(Cli, RunWritesTrajectoryFile) {
  const auto cfg = write("a.cfg", "disease.beta = 0.3\nrelapse.rho = 0.05\n");
  const auto out = (dir_ / "run.csv").string();
  ASSERT_EQ(run({"run", "--config", cfg, "--out", out}), kExitOk) << err_.str();
  const std::string text = slurp(out);
  EXPECT_NE(text.find("time,compartment,value_fraction\n"), std::string::npos);
  EXPECT_NE(text.find("# relapse.rho = 0.05\n"), std::string::npos);
  EXPECT_NE(text.find(",U,"), std::string::npos);
  EXPECT_TRUE(out_.str().empty());
}

TEST_F(Cli, SweepToStdoutMatchesAcrossWorkerCounts) {
  const auto cfg = write("s.cfg", kSweepAxes);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--workers", "1"}), kExitOk) << err_.str();
  const std::string one = out_.str();
  ASSERT_EQ(run({"sweep", "--config", cfg, "--workers", "3", "--seedless"}), kExitOk) << err_.str();
  EXPECT_EQ(out_.str(), one);
  EXPECT_NE(one.find("axis1_value,axis2_value,final_size"), std::string::npos);
}

TEST_F(Cli, SweepWithoutAxesIsAConfigError) {
  const auto cfg = write("s.cfg", "disease.beta = 0.3\n");
  EXPECT_EQ(run({"sweep", "--config", cfg}), kExitConfig);
}

TEST_F(Cli, RepeatedTargetIsAConfigError) {
  const auto cfg = write("s.cfg", std::string(kSweepAxes) +
                                      "sweep.axis2.target = beta_i\nsweep.axis2.min = 0\n"
                                      "sweep.axis2.max = 1\nsweep.axis2.points = 2\n");
  EXPECT_EQ(run({"sweep", "--config", cfg}), kExitConfig);
  EXPECT_NE(err_.str().find("distinct targets"), std::string::npos) << err_.str();
}

TEST_F(Cli, InvalidValueReportsFileLineAndInvariant) {
  const auto cfg = write("bad.cfg", "\ninfo.epsilon = 1.5\n");
  EXPECT_EQ(run({"run", "--config", cfg}), kExitConfig);
  EXPECT_NE(err_.str().find("bad.cfg: line 2: info.epsilon: invariant violated: epsilon ≤ 1"), std::string::npos)
      << err_.str();
}

TEST_F(Cli, OracleTable) {
  ASSERT_EQ(run({"oracle", "--r0", "2.0", "0.5"}), kExitOk) << err_.str();
  EXPECT_EQ(out_.str(), "r0,final_size\n2,0.79681213002\n0.5,0\n");
}

TEST_F(Cli, NumericalBlowUpExitsTwo) {
  const auto cfg = write("blow.cfg", "disease.beta = 50\nrun.dt = 1\nrun.method = euler\ntrigger.kind = none\n");
  EXPECT_EQ(run({"run", "--config", cfg}), kExitNumerical);
  EXPECT_NE(err_.str().find("numerical error"), std::string::npos) << err_.str();
}

TEST_F(Cli, DetectPrintsDailyTable) {
  const auto cfg = write("d.cfg", "trigger.kind = effort\ntrigger.daily_tests = 100\n");
  ASSERT_EQ(run({"detect", "--config", cfg}), kExitOk) << err_.str();
  std::istringstream in(out_.str());
  const Table t = read_table(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"day", "prevalence", "cumulative_probability"}));
  ASSERT_GT(t.rows.size(), 21u);
  EXPECT_EQ(t.rows[0][0], "1");
  bool found = false;
  for (const auto& line : t.metadata) found = found || line == "detection_day = 21";
  EXPECT_TRUE(found);
}

TEST_F(Cli, UnwritableOutputIsAConfigError) {
  const auto cfg = write("a.cfg", "disease.beta = 0.3\n");
  EXPECT_EQ(run({"run", "--config", cfg, "--out", (dir_ / "missing" / "x.csv").string()}), kExitConfig);
}

TEST_F(Cli, MissingConfigIsAConfigError) {
  EXPECT_EQ(run({"run", "--config", (dir_ / "nope.cfg").string()}), kExitConfig);
  EXPECT_EQ(run({"run"}), kExitConfig);
  EXPECT_EQ(run({}), kExitConfig);
  EXPECT_EQ(run({"frobnicate"}), kExitConfig);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}), kExitOk); }
