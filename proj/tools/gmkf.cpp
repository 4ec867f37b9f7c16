// Command-line front end: simulate trajectories, run filters over CSV
// measurements, sweep separation grids, probe the convergence limits and
// benchmark update-stage scaling.
//
// Exit codes: 0 success, 2 configuration/schema error, 3 missing
// prerequisite data, 4 numerical failure.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gmkf/gmkf.hpp"

namespace {

std::string preset_dir_default() {
  if (const char* env = std::getenv("GMKF_PRESET_DIR")) return env;
  return "data";
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw gmkf::ConfigError("bad grid value: " + cell);
    }
  }
  if (out.empty()) throw gmkf::ConfigError("empty grid");
  return out;
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& csv) {
  std::vector<std::pair<int, int>> out;
  for (double v : parse_grid(csv)) {
    const int bank = static_cast<int>(v);
    int cv = static_cast<int>(std::sqrt(static_cast<double>(bank)));
    while (cv > 1 && bank % cv != 0) --cv;
    out.emplace_back(cv, bank / cv);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filtering experiments for linear systems with Gaussian-mixture noise"};
  app.require_subcommand(1);

  std::string preset_dir = preset_dir_default();
  int threads = 1;
  app.add_option("--preset-dir", preset_dir, "Directory with scenario JSON files");
  app.add_option("--threads", threads, "Worker thread cap for Monte-Carlo runs");

  // shared scenario flags
  std::string scenario_ref = "model1";
  double c = -1.0;
  std::int64_t seed = -1;
  int steps = -1;

  auto add_scenario_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_ref, "Preset name or scenario JSON path");
    cmd->add_option("--c", c, "Separation multiplier override");
    cmd->add_option("--seed", seed, "Seed override");
    cmd->add_option("--steps", steps, "Horizon override");
  };

  auto resolve_scenario = [&]() {
    gmkf::Scenario s = gmkf::load_scenario(scenario_ref, preset_dir);
    if (c >= 0.0) s.c = c;
    if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
    if (steps >= 0) {
      if (steps < 1) throw gmkf::ConfigError("--steps must be at least 1");
      s.horizon = steps;
    }
    s.validate();
    return s;
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a labeled synthetic trajectory CSV");
  std::string sim_out = "trajectory.csv";
  add_scenario_flags(sim);
  sim->add_option("--out", sim_out, "Output CSV path");

  // filter
  auto* flt = app.add_subcommand("filter", "Run a filter over a trajectory CSV");
  std::string flt_in, flt_out = "estimates.csv", flt_kind = "kalman", flt_scheme = "merge";
  bool flt_jitter = false;
  add_scenario_flags(flt);
  flt->add_option("--input", flt_in, "Input CSV (t and z columns required)")->required();
  flt->add_option("--out", flt_out, "Output CSV path");
  flt->add_option("--filter", flt_kind, "kalman|gsf|ammse|matched");
  flt->add_option("--scheme", flt_scheme, "merge|remove");
  flt->add_flag("--jitter", flt_jitter, "Enable diagonal jitter before factorizations");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Monte-Carlo sweep over the separation grid");
  std::string swp_out = "sweep_out", swp_grid = "0,0.02,0.05,0.1,0.2,0.5,1,2";
  int swp_runs = 200;
  int swp_kl_samples = 1000000;
  add_scenario_flags(swp);
  swp->add_option("--out", swp_out, "Output directory");
  swp->add_option("--grid", swp_grid, "Comma-separated separation multipliers");
  swp->add_option("--runs", swp_runs, "Monte-Carlo runs per grid point");
  swp->add_option("--kl-samples", swp_kl_samples, "Samples for the KL coordinate");

  // probe
  auto* prb = app.add_subcommand("probe", "Convergence ladders toward the two limit cases");
  std::string prb_out = "probe_out";
  std::string prb_deltas = "1,0.1,0.01,0.001,0.0001,0.00001,0.000001";
  std::string prb_cs = "1,2,5,10,20,50";
  add_scenario_flags(prb);
  prb->add_option("--out", prb_out, "Output directory");
  prb->add_option("--deltas", prb_deltas, "Innovation-spread ladder");
  prb->add_option("--separations", prb_cs, "Separation ladder");

  // bench
  auto* bch = app.add_subcommand("bench", "Update-stage timing vs bank size");
  std::string bch_out = "bench_out", bch_sizes = "1,4,9,25";
  int bch_nx = 2, bch_nz = 1, bch_steps = 2000, bch_reps = 9;
  bch->add_option("--out", bch_out, "Output directory");
  bch->add_option("--sizes", bch_sizes, "Comma-separated bank sizes");
  bch->add_option("--nx", bch_nx, "State dimension");
  bch->add_option("--nz", bch_nz, "Measurement dimension");
  bch->add_option("--bench-steps", bch_steps, "Timed steps per repetition");
  bch->add_option("--reps", bch_reps, "Repetitions (median is reported)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      gmkf::SimulateArgs args{resolve_scenario(), sim_out};
      gmkf::cmd_simulate(args);
      std::cout << "wrote " << sim_out << " (" << args.scenario.horizon << " steps)\n";
    } else if (flt->parsed()) {
      gmkf::FilterArgs args;
      args.scenario = resolve_scenario();
      args.in_path = flt_in;
      args.out_path = flt_out;
      args.kind = gmkf::parse_filter_kind(flt_kind);
      args.scheme = gmkf::parse_scheme(flt_scheme);
      args.options.jitter.enabled = flt_jitter;
      const auto res = gmkf::cmd_filter(args);
      std::cout << "wrote " << flt_out << " (" << res.steps << " steps";
      if (res.fallback_steps > 0) std::cout << ", " << res.fallback_steps << " gain fallbacks";
      std::cout << ")\n";
      if (res.rmse)
        std::cout << "rmse=" << gmkf::format_double(*res.rmse)
                  << " cep=" << gmkf::format_double(*res.cep) << "\n";
    } else if (swp->parsed()) {
      gmkf::SweepArgs args;
      args.scenario = resolve_scenario();
      args.c_grid = parse_grid(swp_grid);
      args.runs = swp_runs;
      args.threads = threads;
      args.out_dir = swp_out;
      args.kl_samples = swp_kl_samples;
      const auto sweep = gmkf::cmd_sweep(args);
      std::cout << "wrote " << swp_out << "/sweep.csv (" << sweep.points.size()
                << " grid points x " << gmkf::all_filters().size() << " filters)\n";
    } else if (prb->parsed()) {
      gmkf::ProbeArgs args;
      args.scenario = resolve_scenario();
      args.deltas = parse_grid(prb_deltas);
      args.c_grid = parse_grid(prb_cs);
      args.out_dir = prb_out;
      gmkf::cmd_probe(args);
      std::cout << "wrote " << prb_out << "/probe_spread.csv and probe_separation.csv\n";
    } else if (bch->parsed()) {
      gmkf::BenchArgs args;
      args.bank_sizes = parse_sizes(bch_sizes);
      args.dims = {bch_nx, bch_nz};
      args.out_dir = bch_out;
      args.options.steps = bch_steps;
      args.options.reps = bch_reps;
      gmkf::cmd_bench(args);
      std::cout << "wrote " << bch_out << "/bench.csv\n";
    }
  } catch (const gmkf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gmkf::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const gmkf::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
