#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmkf/bench.hpp"
#include "gmkf/convergence.hpp"
#include "gmkf/csv.hpp"
#include "gmkf/monte_carlo.hpp"

namespace gmkf {

inline FilterKind parse_filter_kind(const std::string& s) {
  if (s == "kalman") return FilterKind::Kalman;
  if (s == "gsf") return FilterKind::Gsf;
  if (s == "ammse") return FilterKind::Ammse;
  if (s == "matched") return FilterKind::Matched;
  throw ConfigError("unknown filter: " + s + " (expected kalman|gsf|ammse|matched)");
}

inline ReductionScheme parse_scheme(const std::string& s) {
  if (s == "merge") return ReductionScheme::Merge;
  if (s == "remove") return ReductionScheme::Remove;
  throw ConfigError("unknown scheme: " + s + " (expected merge|remove)");
}

/// Sidecar run manifest carrying the resolved configuration hash, seed and
/// run accounting, written next to every command output.
inline void write_manifest(const std::string& out_path, const std::string& command,
                           const nlohmann::json& resolved_config,
                           const nlohmann::json& accounting = {}) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["seed"] = resolved_config.value("seed", std::uint64_t{0});
  manifest["config"] = resolved_config;
  manifest["config_hash"] = fnv1a_hex(resolved_config.dump());
  if (!accounting.empty()) manifest["accounting"] = accounting;
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open manifest for writing: " + out_path);
  out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  Scenario scenario;
  std::string out_path;
};

inline void cmd_simulate(const SimulateArgs& args) {
  args.scenario.validate();
  Rng rng(args.scenario.seed);
  const Trajectory traj = generate_trajectory(args.scenario, rng);

  CsvWriter csv(args.out_path);
  csv.header({"t", "x_true", "v_true", "z", "label_i", "label_j"});
  for (int k = 0; k < traj.size(); ++k) {
    csv.raw_row({format_double((k + 1) * args.scenario.dt),
                 format_double(traj.states[k](0)), format_double(traj.states[k](1)),
                 format_double(traj.measurements[k](0)), std::to_string(traj.labels[k].first),
                 std::to_string(traj.labels[k].second)});
  }
  nlohmann::json cfg = scenario_to_json(args.scenario);
  cfg["command_out"] = args.out_path;
  write_manifest(args.out_path + ".manifest.json", "simulate", cfg);
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

struct FilterArgs {
  Scenario scenario;  // provides the system and noise model
  std::string in_path;
  std::string out_path;
  FilterKind kind = FilterKind::Kalman;
  ReductionScheme scheme = ReductionScheme::Merge;
  FilterOptions options{};
};

struct FilterCommandResult {
  int steps = 0;
  int fallback_steps = 0;
  std::optional<double> rmse;  // present when the input carries ground truth
  std::optional<double> cep;
};

inline FilterCommandResult cmd_filter(const FilterArgs& args) {
  const CsvTable table = read_csv(args.in_path);
  const int col_t = table.require_column("t");
  const int col_z = table.require_column("z");
  const int col_x = table.column("x_true");
  const int col_li = table.column("label_i");
  const int col_lj = table.column("label_j");
  if (table.rows.empty()) throw DataError("input CSV has no data rows: " + args.in_path);

  std::vector<Vector> zs;
  std::vector<std::pair<int, int>> labels;
  zs.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    zs.push_back(Vector::Constant(1, table.number(r, col_z)));
    if (col_li >= 0 && col_lj >= 0)
      labels.emplace_back(static_cast<int>(table.number(r, col_li)),
                          static_cast<int>(table.number(r, col_lj)));
  }
  if (args.kind == FilterKind::Matched && labels.size() != zs.size())
    throw DataError("matched filter requires label_i/label_j columns in the input");

  const auto result =
      run_filter(args.kind, args.scheme, args.scenario.system(), args.scenario.noise(), zs,
                 labels.empty() ? nullptr : &labels, args.options);

  CsvWriter csv(args.out_path);
  csv.header({"t", "xhat", "P00", "P01", "P11", "max_mu", "fallback_flag"});
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto& est = result.estimates[k];
    const auto& diag = result.diagnostics[k];
    csv.raw_row({format_double(table.number(k, col_t)), format_double(est.mean(0)),
                 format_double(est.cov(0, 0)), format_double(est.cov(0, 1)),
                 format_double(est.cov(1, 1)), format_double(diag.max_weight),
                 diag.gain_fallback ? "1" : "0"});
  }

  FilterCommandResult out;
  out.steps = static_cast<int>(zs.size());
  out.fallback_steps = result.fallback_steps;
  if (col_x >= 0) {
    std::vector<double> errors(zs.size());
    for (std::size_t k = 0; k < zs.size(); ++k)
      errors[k] = result.estimates[k].mean(0) - table.number(k, col_x);
    out.rmse = rmse(std::span<const double>(errors));
    out.cep = cep(std::span<const double>(errors));
  }

  nlohmann::json cfg = scenario_to_json(args.scenario);
  cfg["filter"] = filter_name(args.kind, args.scheme);
  cfg["input"] = args.in_path;
  nlohmann::json accounting;
  accounting["fallback_steps"] = out.fallback_steps;
  if (out.rmse) {
    accounting["rmse"] = *out.rmse;
    accounting["cep"] = *out.cep;
  }
  write_manifest(args.out_path + ".manifest.json", "filter", cfg, accounting);
  return out;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  Scenario scenario;
  std::vector<double> c_grid;
  int runs = 200;
  int threads = 1;
  std::string out_dir;
  int kl_samples = 1000000;
};

inline SweepResult cmd_sweep(const SweepArgs& args) {
  if (args.c_grid.empty()) throw ConfigError("sweep needs a non-empty c grid");
  std::filesystem::create_directories(args.out_dir);
  SweepOptions opts;
  opts.mc.runs = args.runs;
  opts.mc.threads = args.threads;
  opts.kl_samples = args.kl_samples;
  const SweepResult sweep = separation_sweep(args.scenario, args.c_grid, all_filters(), opts);

  CsvWriter csv(args.out_dir + "/sweep.csv");
  csv.header({"c", "kl", "filter", "metric", "value", "lo", "hi"});
  for (const auto& p : sweep.points) {
    for (const auto& f : p.mc.filters) {
      csv.raw_row({format_double(p.c), format_double(p.kl), f.spec.name(), "rmse",
                   format_double(f.rmse.mean), format_double(f.rmse.lo),
                   format_double(f.rmse.hi)});
      csv.raw_row({format_double(p.c), format_double(p.kl), f.spec.name(), "cep",
                   format_double(f.cep.mean), format_double(f.cep.lo),
                   format_double(f.cep.hi)});
    }
  }

  CsvWriter tests(args.out_dir + "/tests.csv");
  tests.header({"c", "kl", "test", "statistic", "threshold", "accepted"});
  for (const auto& p : sweep.points) {
    if (!p.mc.has_distribution_tests) continue;
    const auto emit = [&](const char* name, const TestResult& t) {
      tests.raw_row({format_double(p.c), format_double(p.kl), name,
                     format_double(t.statistic), format_double(t.threshold),
                     t.accepted ? "1" : "0"});
    };
    emit("ks_ammse_merge_vs_gsf_merge", p.mc.ks_ammse_vs_gsf);
    emit("ks_ammse_merge_vs_truth", p.mc.ks_ammse_vs_truth);
    emit("ab_ammse_merge_vs_gsf_merge", p.mc.ab_ammse_vs_gsf);
  }

  // gnuplot-style data files: x is the KL divergence, one column per filter
  for (const char* metric : {"rmse", "cep"}) {
    std::ofstream plot(args.out_dir + "/plot_" + metric + ".dat");
    plot << "# kl";
    for (const auto& f : all_filters()) plot << " " << f.name();
    plot << "\n";
    for (const auto& p : sweep.points) {
      plot << format_double(p.kl);
      for (const auto& f : p.mc.filters) {
        const MetricSummary& m =
            std::string(metric) == "rmse" ? f.rmse : f.cep;
        plot << " " << format_double(m.mean);
      }
      plot << "\n";
    }
  }

  nlohmann::json cfg = scenario_to_json(args.scenario);
  cfg["c_grid"] = args.c_grid;
  cfg["runs"] = args.runs;
  cfg["kl_samples"] = args.kl_samples;
  nlohmann::json accounting;
  int excluded = 0;
  long fallbacks = 0;
  for (const auto& p : sweep.points) {
    excluded += p.mc.excluded_runs;
    for (const auto& f : p.mc.filters) fallbacks += f.fallback_steps;
  }
  accounting["excluded_runs"] = excluded;
  accounting["fallback_steps"] = fallbacks;
  write_manifest(args.out_dir + "/manifest.json", "sweep", cfg, accounting);
  return sweep;
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

struct ProbeArgs {
  Scenario scenario;
  std::vector<double> deltas = {1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> c_grid = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  std::string out_dir;
  ProbeOptions options{};
};

inline ConvergenceProbe cmd_probe(const ProbeArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const ConvergenceProbe probe =
      convergence_probe(args.scenario, args.deltas, args.c_grid, args.options);

  CsvWriter spread(args.out_dir + "/probe_spread.csv");
  spread.header({"delta", "gain_gap", "estimate_gap"});
  for (const auto& r : probe.spread_ladder)
    spread.row({r.delta, r.gain_gap, r.estimate_gap});

  CsvWriter sep(args.out_dir + "/probe_separation.csv");
  sep.header({"c", "min_separation_sigma", "min_max_weight", "ammse_gap", "gsf_gap"});
  for (const auto& r : probe.separation_ladder)
    sep.row({r.c, r.min_separation_sigma, r.min_max_weight, r.ammse_gap, r.gsf_gap});

  nlohmann::json cfg = scenario_to_json(args.scenario);
  cfg["deltas"] = args.deltas;
  cfg["c_grid"] = args.c_grid;
  write_manifest(args.out_dir + "/manifest.json", "probe", cfg);
  return probe;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::pair<int, int>> bank_sizes = {{1, 1}, {2, 2}, {3, 3}, {5, 5}};
  std::pair<int, int> dims = {2, 1};
  std::string out_dir;
  BenchOptions options{};
};

inline BenchResult cmd_bench(const BenchArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const BenchResult bench = complexity_bench(args.bank_sizes, args.dims, args.options);

  CsvWriter csv(args.out_dir + "/bench.csv");
  csv.header({"bank_size", "cv", "cw", "filter", "update_stage_us"});
  for (const auto& r : bench.rows)
    csv.raw_row({std::to_string(r.cv * r.cw), std::to_string(r.cv), std::to_string(r.cw),
                 r.filter, format_double(r.update_stage_us)});

  nlohmann::json cfg;
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& [cv, cw] : args.bank_sizes) sizes.push_back({cv, cw});
  cfg["bank_sizes"] = sizes;
  cfg["dims"] = {args.dims.first, args.dims.second};
  cfg["seed"] = args.options.seed;
  write_manifest(args.out_dir + "/manifest.json", "bench", cfg);
  return bench;
}

}  // namespace gmkf
