#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gmkf/csv.hpp"
#include "gmkf/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string out_file = ::testing::TempDir() + "cli_stdout.txt";
  const std::string cmd =
      std::string(GMKF_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

}  // namespace

TEST(CliSimulate, WritesHeaderPlusRequestedRows) {
  const std::string out = temp_path("sim10.csv");
  const auto r =
      run_cli("simulate --scenario model1 --c 1 --seed 7 --steps 10 --out " + out);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string text = slurp(out);
  EXPECT_EQ(line_count(text), 11);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x_true,v_true,z,label_i,label_j");
  EXPECT_TRUE(fs::exists(out + ".manifest.json"));
}

TEST(CliSimulate, RepeatInvocationIsByteIdentical) {
  const std::string a = temp_path("sim_a.csv");
  const std::string b = temp_path("sim_b.csv");
  ASSERT_EQ(run_cli("simulate --scenario model2 --c 0.3 --seed 9 --steps 25 --out " + a)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("simulate --scenario model2 --c 0.3 --seed 9 --steps 25 --out " + b)
                .exit_code,
            0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(CliSimulate, ZeroStepsIsConfigErrorWithoutOutput) {
  const std::string out = temp_path("sim_zero.csv");
  fs::remove(out);
  const auto r = run_cli("simulate --scenario model1 --steps 0 --out " + out);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliSimulate, UnknownScenarioIsConfigError) {
  EXPECT_EQ(run_cli("simulate --scenario nope --out " + temp_path("x.csv")).exit_code, 2);
}

TEST(CliFilter, SingleComponentNoiseMakesKalmanAndGsfIdentical) {
  // write a single-component scenario file, then compare outputs byte for byte
  gmkf::Scenario s;
  s.name = "single";
  s.horizon = 60;
  s.seed = 3;
  s.process = gmkf::detail::scalar_spec({1.0}, {0.0}, {0.5}, false);
  s.measurement = gmkf::detail::scalar_spec({1.0}, {0.0}, {1.0}, false);
  const std::string scen = temp_path("single.json");
  {
    std::ofstream out(scen);
    out << gmkf::scenario_to_json(s).dump(2);
  }
  const std::string traj = temp_path("single_traj.csv");
  ASSERT_EQ(run_cli("simulate --scenario " + scen + " --out " + traj).exit_code, 0);

  const std::string est_k = temp_path("est_kalman.csv");
  const std::string est_g = temp_path("est_gsf.csv");
  ASSERT_EQ(run_cli("filter --scenario " + scen + " --input " + traj +
                    " --filter kalman --out " + est_k)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("filter --scenario " + scen + " --input " + traj +
                    " --filter gsf --scheme merge --out " + est_g)
                .exit_code,
            0);
  EXPECT_EQ(slurp(est_k), slurp(est_g));
}

TEST(CliFilter, MissingMeasurementColumnIsSchemaError) {
  const std::string bad = temp_path("bad.csv");
  {
    std::ofstream out(bad);
    out << "t,value\n0.1,1.0\n";
  }
  const auto r = run_cli("filter --scenario model1 --input " + bad + " --out " +
                         temp_path("bad_out.csv"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(CliFilter, MatchedWithoutLabelsIsMissingDataError) {
  const std::string traj = temp_path("nolabels.csv");
  {
    std::ofstream out(traj);
    out << "t,z\n0.1,0.5\n0.2,0.4\n0.3,0.1\n";
  }
  const auto r = run_cli("filter --scenario model1 --input " + traj +
                         " --filter matched --out " + temp_path("m_out.csv"));
  EXPECT_EQ(r.exit_code, 3) << r.output;
}

TEST(CliFilter, ReportsMetricsWhenTruthPresent) {
  const std::string traj = temp_path("with_truth.csv");
  ASSERT_EQ(
      run_cli("simulate --scenario glint --steps 80 --seed 21 --out " + traj).exit_code, 0);
  const auto r = run_cli("filter --scenario glint --input " + traj +
                         " --filter ammse --scheme merge --out " +
                         temp_path("glint_est.csv"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("rmse="), std::string::npos);
  EXPECT_NE(r.output.find("cep="), std::string::npos);
}

TEST(CliFilter, EstimateHeaderIsStable) {
  const std::string traj = temp_path("hdr.csv");
  ASSERT_EQ(run_cli("simulate --scenario model1 --steps 5 --out " + traj).exit_code, 0);
  const std::string est = temp_path("hdr_est.csv");
  ASSERT_EQ(
      run_cli("filter --scenario model1 --input " + traj + " --out " + est).exit_code, 0);
  const std::string text = slurp(est);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,xhat,P00,P01,P11,max_mu,fallback_flag");
  EXPECT_EQ(line_count(text), 6);
}

TEST(CliSweep, TinyGridProducesExpectedShape) {
  const std::string dir = temp_path("sweep_tiny");
  const auto r = run_cli("sweep --scenario model1 --grid 0,0.02 --runs 4 --steps 40 "
                         "--kl-samples 2000 --out " +
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto table = gmkf::read_csv(dir + "/sweep.csv");
  EXPECT_EQ(table.rows.size(), 2u * 6u * 2u);  // points x filters x metrics
  EXPECT_TRUE(fs::exists(dir + "/plot_rmse.dat"));
  EXPECT_TRUE(fs::exists(dir + "/plot_cep.dat"));
  EXPECT_TRUE(fs::exists(dir + "/tests.csv"));
  EXPECT_NE(slurp(dir + "/manifest.json").find("config_hash"), std::string::npos);
}

TEST(CliProbe, LaddersAreWrittenAndMonotone) {
  const std::string dir = temp_path("probe_tiny");
  const auto r = run_cli("probe --scenario model1 --deltas 0.1,0.001 --separations 30 "
                         "--steps 50 --out " +
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto spread = gmkf::read_csv(dir + "/probe_spread.csv");
  ASSERT_EQ(spread.rows.size(), 2u);
  const int gap = spread.require_column("gain_gap");
  EXPECT_GE(spread.rows[0][gap], spread.rows[1][gap]);
  const auto sep = gmkf::read_csv(dir + "/probe_separation.csv");
  ASSERT_EQ(sep.rows.size(), 1u);
  EXPECT_GT(sep.rows[0][sep.require_column("min_max_weight")], 1.0 - 1e-6);
}

TEST(CliBench, WritesOneRowPerSizeAndVariant) {
  const std::string dir = temp_path("bench_tiny");
  const auto r = run_cli("bench --sizes 1,4 --bench-steps 50 --reps 3 --out " + dir);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto table = gmkf::read_csv(dir + "/bench.csv");
  EXPECT_EQ(table.rows.size(), 8u);
}

TEST(CliGeneral, PresetDirectoryEnvRespected) {
  const auto r = run_cli("--preset-dir " GMKF_DATA_DIR
                         " simulate --scenario uwb_x --steps 5 --out " +
                         temp_path("uwb_sim.csv"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
}

TEST(CliGeneral, DemoUwbPipelineCompletes) {
  const std::string est = temp_path("uwb_demo_est.csv");
  const auto r = run_cli("filter --scenario uwb_x --input " GMKF_DATA_DIR
                         "/uwb_demo.csv --filter ammse --scheme merge --out " +
                         est);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("rmse="), std::string::npos);
}
