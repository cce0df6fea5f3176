#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nkarena/analytics.hpp"
#include "nkarena/results_io.hpp"

namespace fs = std::filesystem;
using namespace nkarena;

namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Outcome cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + " " + NKARENA_CLI_PATH + " " + args + " 2>&1";
  Outcome result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer{};
  while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) result.output += buffer.data();
  const int status = ::pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("nkarena_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, AnalyticValues) {
  auto r = cli("analytic --n 12 --m 10 --which mean-cost");
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.output), 1.0011, 1e-4);
  r = cli("analytic --n 12 --m 1 --which mean-t");
  EXPECT_EQ(r.output, "4096\n");
  r = cli("analytic --n 12 --m 10 --which cdf --t inf");
  EXPECT_EQ(r.output, "1\n");
  r = cli("analytic --n 12 --m 10 --which cdf --t 410");
  EXPECT_NEAR(std::stod(r.output), 0.6325, 1e-3);
  r = cli("analytic --n 10 --m 1 --which mean-t --degenerate");
  EXPECT_EQ(r.output, "512\n");
  EXPECT_EQ(cli("analytic --n 12 --m 1 --which pmf --t 0").code, 1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("analytic --n 12 --which mean-t --bogus").code, 1);
  EXPECT_EQ(cli("gen --n 12 --k 12 --out " + path("data")).code, 1);
  EXPECT_EQ(cli("figure --which 9").code, 1);
  EXPECT_EQ(cli("run --ensemble x --algo hill").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(CliTest, HelpListsDefaults) {
  const auto r = cli("run --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--ensemble", "--algo", "--m", "--u", "--runs", "--tmax", "--seed", "--out", "--jobs"}) {
    EXPECT_NE(r.output.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(r.output.find("1000"), std::string::npos);
  EXPECT_NE(r.output.find("20190501"), std::string::npos);
}

TEST_F(CliTest, GenIsDeterministicAndGuarded) {
  const std::string args = "gen --family nk --n 10 --k 3 --count 4 --seed 7 --out " + path("data");
  const auto first = cli(args);
  ASSERT_EQ(first.code, 0) << first.output;
  EXPECT_NE(first.output.find("wrote 4 landscapes"), std::string::npos);
  EXPECT_NE(first.output.find("mean local maxima"), std::string::npos);
  EXPECT_EQ(cli(args).code, 2);
  const auto second = cli(args + " --overwrite");
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(first.output, second.output);
}

TEST_F(CliTest, DataRootFromEnvironment) {
  const auto r = cli("gen --family ising-ni --n 8 --count 1", "NK_ARENA_DATA=" + path("envdata"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir_ / "envdata" / "ising-ni_N8" / "manifest.txt"));
}

TEST_F(CliTest, RunMissingEnsemble) {
  const auto r = cli("run --ensemble " + path("nowhere") + " --algo il");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find(path("nowhere")), std::string::npos);
}

TEST_F(CliTest, RawForcesSingleWalker) {
  ASSERT_EQ(cli("gen --n 10 --k 0 --count 2 --out " + path("data")).code, 0);
  const auto r = cli("run --ensemble " + path("data/N10_K0") + " --algo raw --m 5 --runs 20 --out " + path("out"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("warning"), std::string::npos);
  const auto rows = import_results(dir_ / "out" / "results.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].m, 1u);
}

TEST_F(CliTest, BlindSearchAgreesWithClosedForm) {
  ASSERT_EQ(cli("gen --n 10 --k 2 --count 10 --out " + path("data")).code, 0);
  const auto r = cli("run --ensemble " + path("data/N10_K2") + " --algo bs --m 10 --runs 300 --jobs 2 --out " +
                     path("out"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto rows = import_results(dir_ / "out" / "results.csv");
  ASSERT_EQ(rows.size(), 1u);
  const double expected = mean_cost(BlindSearchModel::for_length(10, 10), 10);
  EXPECT_LT(std::abs(rows[0].mean_cost - expected), 3 * rows[0].stderr_cost);
  EXPECT_EQ(rows[0].censored_fraction, 0.0);
}

TEST_F(CliTest, RunGridAndStats) {
  ASSERT_EQ(cli("gen --n 10 --k 3 --count 3 --out " + path("data")).code, 0);
  const auto r = cli("run --ensemble " + path("data/N10_K3") + " --algo sga --m 4,8 --u 0.05,0.1 --runs 3 --out " +
                     path("out"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(import_results(dir_ / "out" / "results.csv").size(), 4u);
  EXPECT_EQ(cli("run --ensemble " + path("data/N10_K3") + " --algo sga --m 1 --runs 3 --out " + path("o2")).code, 1);
  const auto s = cli("stats --ensemble " + path("data/N10_K3") + " --pairs 2000");
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.output.find("neighbor correlation"), std::string::npos);
}

TEST_F(CliTest, FigureSmoke) {
  const auto r = cli("figure --which 6 --landscapes 2 --runs 3 --data " + path("data") + " --out " + path("fig6"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto rows = import_results(dir_ / "fig6" / "results.csv");
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_TRUE(fs::exists(dir_ / "fig6" / "baseline.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "data" / "N12_K9" / "manifest.txt"));
}

TEST_F(CliTest, ImitationCostPeaksAtLargePopulations) {
  ASSERT_EQ(cli("gen --n 12 --k 9 --count 10 --out " + path("data")).code, 0);
  const std::string ensemble = path("data/N12_K9");
  ASSERT_EQ(cli("run --ensemble " + ensemble + " --algo il --m 20 --u 0.1 --runs 20 --out " + path("m20")).code, 0);
  ASSERT_EQ(cli("run --ensemble " + ensemble + " --algo il --m 200 --u 0.1 --runs 20 --out " + path("m200")).code, 0);
  const double small = import_results(dir_ / "m20" / "results.csv").front().mean_cost;
  const double large = import_results(dir_ / "m200" / "results.csv").front().mean_cost;
  EXPECT_GT(large, small);
}
