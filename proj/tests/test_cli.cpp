#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path log = workdir / "run.log";
  const std::string cmd =
      std::string(D2DNET_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("d2dnet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string scenario_path() {
  return (fs::path(D2DNET_SCENARIO_DIR) / "table1.cfg").string();
}

int count_lines(const fs::path& file) {
  std::ifstream in(file);
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  return lines;
}

TEST(Cli, UsageErrorsExitTwo) {
  const fs::path dir = fresh_dir("usage");
  EXPECT_EQ(run_cli("bogus-subcommand", dir).exit_code, 2);
  EXPECT_EQ(run_cli("assoc", dir).exit_code, 2);  // --config is required
  EXPECT_EQ(run_cli("--config /nonexistent.cfg assoc", dir).exit_code, 2);
  const RunResult bad_grid = run_cli(
      "--config " + scenario_path() + " --out " + dir.string() + " coverage --grid 5:1:1", dir);
  EXPECT_EQ(bad_grid.exit_code, 2);
  EXPECT_NE(bad_grid.output.find("grid"), std::string::npos);
  EXPECT_EQ(run_cli("--help", dir).exit_code, 0);
}

TEST(Cli, BadConfigValueIsConfigError) {
  const fs::path dir = fresh_dir("badcfg");
  const fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "lambda_b = 1e-6\nalpha = oops\n";
  const RunResult r = run_cli("--config " + cfg.string() + " assoc", dir);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("config error"), std::string::npos);
  EXPECT_NE(r.output.find("line 2"), std::string::npos);
}

TEST(Cli, AssocReportsAnalyticAndZScore) {
  const fs::path dir = fresh_dir("assoc");
  const RunResult r =
      run_cli("--config " + scenario_path() + " --seed 7 assoc --trials 50000", dir);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("analytic (integral)"), std::string::npos);
  EXPECT_NE(r.output.find("analytic (closed)"), std::string::npos);
  EXPECT_NE(r.output.find("monte carlo"), std::string::npos);
  EXPECT_NE(r.output.find("z-score"), std::string::npos);
  EXPECT_NE(r.output.find("0.0002783670587"), std::string::npos);
}

TEST(Cli, CoverageWritesCsvPerModeAndPlotScript) {
  const fs::path dir = fresh_dir("coverage");
  const RunResult r = run_cli("--config " + scenario_path() + " --out " + dir.string() +
                                  " coverage --grid -6:6:3 --trials 400",
                              dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* name : {"coverage_cellular.csv", "coverage_hd.csv", "coverage_fd.csv"}) {
    const fs::path csv = dir / name;
    ASSERT_TRUE(fs::exists(csv)) << name;
    EXPECT_EQ(count_lines(csv), 6) << name;  // header + 5 grid points
  }
  EXPECT_TRUE(fs::exists(dir / "plot_coverage.py"));
}

TEST(Cli, CoverageModeFilterLimitsWork) {
  const fs::path dir = fresh_dir("coverage_hd");
  const RunResult r = run_cli("--config " + scenario_path() + " --out " + dir.string() +
                                  " coverage --grid 0:0:1 --mode hd --trials 200",
                              dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "coverage_hd.csv"));
  EXPECT_FALSE(fs::exists(dir / "coverage_cellular.csv"));
  EXPECT_FALSE(fs::exists(dir / "coverage_fd.csv"));
}

TEST(Cli, RateWritesTable) {
  const fs::path dir = fresh_dir("rate");
  const RunResult r = run_cli(
      "--config " + scenario_path() + " --out " + dir.string() + " rate --trials 300", dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const fs::path csv = dir / "rates.csv";
  ASSERT_TRUE(fs::exists(csv));
  EXPECT_EQ(count_lines(csv), 4);  // header + cellular + hd + fd
  EXPECT_NE(r.output.find("cellular"), std::string::npos);
}

TEST(Cli, ThroughputSweepsBias) {
  const fs::path dir = fresh_dir("throughput");
  const RunResult r = run_cli("--config " + scenario_path() + " --out " + dir.string() +
                                  " throughput --grid 0:1:0.5",
                              dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(count_lines(dir / "throughput.csv"), 4);  // header + 3 ks
  EXPECT_TRUE(fs::exists(dir / "plot_throughput.py"));
  EXPECT_NE(r.output.find("argmax k"), std::string::npos);
}

TEST(Cli, ValidateSubsetPassesAndWritesJson) {
  const fs::path dir = fresh_dir("validate");
  const RunResult r = run_cli("--config " + scenario_path() + " --out " + dir.string() +
                                  " validate --only special",
                              dir);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("[PASS]"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "validate_report.json"));
}

TEST(Cli, ValidateTightenedToleranceExitsOne) {
  const fs::path dir = fresh_dir("validate_tight");
  const RunResult r =
      run_cli("--config " + scenario_path() + " --out " + dir.string() +
                  " validate --only mc.d2d_coverage --trials 300 --mc-tol 1e-9",
              dir);
  EXPECT_EQ(r.exit_code, 1) << r.output;
  EXPECT_NE(r.output.find("[FAIL]"), std::string::npos);
}

}  // namespace
