#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace opinionflow;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "opinionflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("opinionflow_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ListScenarios) {
  const auto r = invoke({"list-scenarios"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("flt-asymmetric"), std::string::npos);
  EXPECT_NE(r.out.find("single-porous"), std::string::npos);
}

TEST(Cli, RunWritesFilesAndPlots) {
  const auto dir = scratch("run");
  const auto r = invoke({"run", "--scenario", "flt-symmetric", "--particles", "30", "--t-final", "0.2", "--out",
                         dir.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "trajectories_q.csv"));
  EXPECT_TRUE(fs::exists(dir / "run.json"));
  const auto p = invoke({"plot", dir.string()});
  ASSERT_EQ(p.code, cli::kExitOk) << p.err;
  const auto all = slurp(dir / "trajectories_all.svg");
  EXPECT_NE(all.find("troll trajectory"), std::string::npos);
  EXPECT_NE(slurp(dir / "trajectories_f.svg").find("mean-opinion"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "density_q.svg"));
  fs::remove_all(dir);
}

TEST(Cli, UnknownScenarioFails) {
  EXPECT_EQ(invoke({"run", "--scenario", "nope"}).code, cli::kExitError);
}

TEST(Cli, ValidateConfig) {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[scenario]\nname = x\nparticles = 10\n\n[species.u]\nmass = 0.6\nalpha = 0.5\n"
                                    "half_lambda_sq = 0.03\ninitial = uniform\n\n[kernels]\nu,u = constant\n";
  const auto bad = invoke({"validate-config", (dir / "bad.ini").string()});
  EXPECT_EQ(bad.code, cli::kExitError);
  EXPECT_NE(bad.err.find("D2"), std::string::npos);

  std::ofstream(dir / "typo.ini") << "[scenario]\nname = x\nparticels = 10\n";
  const auto typo = invoke({"validate-config", (dir / "typo.ini").string()});
  EXPECT_EQ(typo.code, cli::kExitError);
  EXPECT_NE(typo.err.find("line 3"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, BadFlagsFail) {
  EXPECT_EQ(invoke({"run", "--scenario", "single-ini1", "--scheme", "leapfrog"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"run", "--scenario", "single-ini1", "--dt", "0.1", "--cfl", "0.2"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitError);
}

TEST(Cli, MonitorViolationsGiveExitTwo) {
  // A coarse explicit Euler step keeps the ordering but overshoots the min-max bounds.
  const auto dir = scratch("viol");
  const auto r = invoke({"run", "--scenario", "single-ini1", "--particles", "40", "--t-final", "1", "--scheme",
                         "euler", "--dt", "0.05", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitViolations) << r.err;
  EXPECT_NE(r.err.find("violation"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CompareStationaryWritesSeries) {
  const auto dir = scratch("cmp");
  const auto r = invoke({"compare-stationary", "--scenario", "single-ini1", "--particles", "50", "--t-final", "1",
                         "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(slurp(dir / "compare_stationary.csv").rfind("t,m1,w1_to_target", 0), 0u);
  EXPECT_EQ(invoke({"compare-stationary", "--scenario", "fl-symmetric"}).code, cli::kExitError);
  fs::remove_all(dir);
}

TEST(Cli, ConvergenceStudyTable) {
  const auto r = invoke({"convergence-study", "--scenario", "single-ini1", "--t-final", "0.2", "--n-list", "20,40,80"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("40"), std::string::npos);
  EXPECT_EQ(invoke({"convergence-study", "--scenario", "single-ini1", "--n-list", "40,20"}).code, cli::kExitError);
}

TEST(CliHelpers, DecayFitAndMonotoneFraction) {
  std::vector<double> t, y;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.1 * i);
    y.push_back(0.3 * std::exp(-0.7 * t.back()));
  }
  EXPECT_NEAR(cli::fit_decay_rate(t, y), 0.7, 1e-12);
  const std::vector<double> d{3.0, 2.0, 2.5, 1.0, 0.5};
  EXPECT_DOUBLE_EQ(cli::monotone_fraction(d), 0.75);
}

TEST(CliHelpers, ConvergenceStudyRowsDecrease) {
  auto sc = preset("single-ini1");
  sc.integrator.t_final = 0.5;
  const auto rows = cli::convergence_study(sc, {25, 50, 100}, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[1].distance, rows[0].distance);
  EXPECT_TRUE(std::isnan(rows[0].order));
}
