#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "gmkf/filter.hpp"
#include "gmkf/stats.hpp"
#include "gmkf/trajectory.hpp"

namespace gmkf {

inline const std::vector<FilterSpec>& all_filters() {
  static const std::vector<FilterSpec> filters = {
      {FilterKind::Kalman, ReductionScheme::Merge},
      {FilterKind::Matched, ReductionScheme::Merge},
      {FilterKind::Gsf, ReductionScheme::Merge},
      {FilterKind::Gsf, ReductionScheme::Remove},
      {FilterKind::Ammse, ReductionScheme::Merge},
      {FilterKind::Ammse, ReductionScheme::Remove},
  };
  return filters;
}

struct MetricSummary {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  double half_width() const { return 0.5 * (hi - lo); }
  bool overlaps(const MetricSummary& other) const { return lo <= other.hi && other.lo <= hi; }
};

inline MetricSummary summarize(const std::vector<double>& per_run) {
  MetricSummary s;
  double acc = 0.0;
  for (double v : per_run) acc += v;
  s.mean = acc / static_cast<double>(per_run.size());
  if (per_run.size() >= 2) {
    const auto [lo, hi] = confidence_interval(per_run);
    s.lo = lo;
    s.hi = hi;
  } else {
    s.lo = s.hi = s.mean;
  }
  return s;
}

struct FilterOutcome {
  FilterSpec spec;
  MetricSummary rmse;
  MetricSummary cep;
  std::vector<double> run_rmse;
  std::vector<double> run_cep;
  long fallback_steps = 0;
};

struct MonteCarloResult {
  std::vector<FilterOutcome> filters;
  int runs = 0;
  int excluded_runs = 0;
  // Distribution tests on pooled position estimates; present when both
  // merge-scheme banks were run.
  bool has_distribution_tests = false;
  TestResult ks_ammse_vs_gsf;
  TestResult ks_ammse_vs_truth;
  TestResult ab_ammse_vs_gsf;

  const FilterOutcome& outcome(const FilterSpec& spec) const {
    for (const auto& f : filters)
      if (f.spec == spec) return f;
    throw ConfigError("filter not present in result: " + spec.name());
  }
  const FilterOutcome& outcome(const std::string& name) const {
    for (const auto& f : filters)
      if (f.spec.name() == name) return f;
    throw ConfigError("filter not present in result: " + name);
  }
};

struct MonteCarloOptions {
  int runs = 1000;
  int threads = 1;
  FilterOptions filter{};
  bool distribution_tests = true;
};

/// Independent seeded trajectories; every filter consumes the same
/// measurement sequence within a run, so metric differences are attributable
/// to the filters alone. Runs whose filter recursion fails outright are
/// excluded (and counted); more than 1% exclusions fails the experiment.
inline MonteCarloResult monte_carlo(const Scenario& scenario,
                                    const std::vector<FilterSpec>& filters,
                                    const MonteCarloOptions& opts = {}) {
  if (opts.runs < 2) throw ConfigError("monte_carlo needs at least two runs");
  const int nf = static_cast<int>(filters.size());
  const int horizon = scenario.horizon;

  int ammse_idx = -1, gsf_idx = -1;
  for (int f = 0; f < nf; ++f) {
    if (filters[f].kind == FilterKind::Ammse && filters[f].scheme == ReductionScheme::Merge)
      ammse_idx = f;
    if (filters[f].kind == FilterKind::Gsf && filters[f].scheme == ReductionScheme::Merge)
      gsf_idx = f;
  }
  const bool sample_tests =
      opts.distribution_tests && ammse_idx >= 0 && gsf_idx >= 0;

  struct RunSlot {
    bool ok = false;
    std::vector<double> rmse, cep;
    long fallbacks_total = 0;
    std::vector<long> fallbacks;
    std::vector<double> ammse_pos, gsf_pos, truth_pos;
  };
  std::vector<RunSlot> slots(opts.runs);

  const LinearSystem sys = scenario.system();
  const NoiseModel noise = scenario.noise();
  const bool fixed = sys.state_dim() == 2 && sys.meas_dim() == 1;
  const auto fixed_model = fixed ? make_bank_model<2, 1>(sys, noise) : BankModel<2, 1>{};
  const auto dyn_model = !fixed ? make_bank_model<Eigen::Dynamic, Eigen::Dynamic>(sys, noise)
                                : BankModel<Eigen::Dynamic, Eigen::Dynamic>{};

  auto run_one = [&](int r) {
    RunSlot& slot = slots[r];
    Rng rng = Rng::stream(scenario.seed, static_cast<std::uint64_t>(r));
    const Trajectory traj = generate_trajectory(scenario, rng);
    slot.rmse.resize(nf);
    slot.cep.resize(nf);
    slot.fallbacks.assign(nf, 0);

    std::vector<Eigen::Matrix<double, 1, 1>> zs1;
    if (fixed) {
      zs1.resize(traj.measurements.size());
      for (std::size_t k = 0; k < traj.measurements.size(); ++k)
        zs1[k](0, 0) = traj.measurements[k](0);
    }

    try {
      for (int f = 0; f < nf; ++f) {
        FilterResult res;
        if (fixed)
          res = run_filter<2, 1>(filters[f].kind, filters[f].scheme, fixed_model, zs1,
                                 &traj.labels, opts.filter);
        else
          res = run_filter<Eigen::Dynamic, Eigen::Dynamic>(filters[f].kind, filters[f].scheme,
                                                           dyn_model, traj.measurements,
                                                           &traj.labels, opts.filter);
        std::vector<double> errors(horizon);
        for (int k = 0; k < horizon; ++k)
          errors[k] = res.estimates[k].mean(0) - traj.states[k](0);
        slot.rmse[f] = rmse(std::span<const double>(errors));
        slot.cep[f] = cep(std::span<const double>(errors));
        slot.fallbacks[f] = res.fallback_steps;
        slot.fallbacks_total += res.fallback_steps;
        if (sample_tests && (f == ammse_idx || f == gsf_idx)) {
          auto& dst = f == ammse_idx ? slot.ammse_pos : slot.gsf_pos;
          dst.resize(horizon);
          for (int k = 0; k < horizon; ++k) dst[k] = res.estimates[k].mean(0);
        }
      }
      if (sample_tests) {
        slot.truth_pos.resize(horizon);
        for (int k = 0; k < horizon; ++k) slot.truth_pos[k] = traj.states[k](0);
      }
      slot.ok = true;
    } catch (const NumericError&) {
      slot.ok = false;  // excluded run, counted below
    }
  };

  const int workers = std::max(1, std::min(opts.threads, opts.runs));
  if (workers == 1) {
    for (int r = 0; r < opts.runs; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < opts.runs; r = next.fetch_add(1)) run_one(r);
      });
    for (auto& th : pool) th.join();
  }

  MonteCarloResult result;
  result.runs = opts.runs;
  result.filters.resize(nf);
  for (int f = 0; f < nf; ++f) result.filters[f].spec = filters[f];

  std::vector<double> ammse_pool, gsf_pool, truth_pool;
  for (int r = 0; r < opts.runs; ++r) {
    const RunSlot& slot = slots[r];
    if (!slot.ok) {
      ++result.excluded_runs;
      continue;
    }
    for (int f = 0; f < nf; ++f) {
      result.filters[f].run_rmse.push_back(slot.rmse[f]);
      result.filters[f].run_cep.push_back(slot.cep[f]);
      result.filters[f].fallback_steps += slot.fallbacks[f];
    }
    if (sample_tests) {
      ammse_pool.insert(ammse_pool.end(), slot.ammse_pos.begin(), slot.ammse_pos.end());
      gsf_pool.insert(gsf_pool.end(), slot.gsf_pos.begin(), slot.gsf_pos.end());
      truth_pool.insert(truth_pool.end(), slot.truth_pos.begin(), slot.truth_pos.end());
    }
  }
  if (result.excluded_runs > 0 &&
      static_cast<double>(result.excluded_runs) > 0.01 * opts.runs)
    throw NumericError("more than 1% of Monte-Carlo runs failed (" +
                       std::to_string(result.excluded_runs) + " of " +
                       std::to_string(opts.runs) + ")");

  for (int f = 0; f < nf; ++f) {
    result.filters[f].rmse = summarize(result.filters[f].run_rmse);
    result.filters[f].cep = summarize(result.filters[f].run_cep);
  }
  if (sample_tests && !ammse_pool.empty()) {
    result.has_distribution_tests = true;
    result.ks_ammse_vs_gsf = ks_two_sample(ammse_pool, gsf_pool);
    result.ks_ammse_vs_truth = ks_two_sample(ammse_pool, truth_pool);
    result.ab_ammse_vs_gsf = ansari_bradley(ammse_pool, gsf_pool);
  }
  return result;
}

/// One Monte-Carlo experiment per separation value, with the KL divergence of
/// the varying noise mixture as the sweep coordinate. Points come out sorted
/// by KL.
struct SweepPoint {
  double c = 0.0;
  double kl = 0.0;
  MonteCarloResult mc;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  MonteCarloOptions mc{};
  int kl_samples = 1000000;
  std::uint64_t kl_seed = 2024;
};

/// The KL coordinate uses whichever noise mixture actually varies with the
/// separation multiplier (the synthetic models use the same mixture on both
/// sides).
inline double scenario_kl(const Scenario& scenario, int n_samples, std::uint64_t seed) {
  const NoiseModel noise = scenario.noise();
  const GaussianMixture& mix =
      noise.process.size() > 1 ? noise.process : noise.measurement;
  if (mix.size() <= 1) return 0.0;
  Rng rng(seed);
  return kl_to_moment_matched(mix, n_samples, rng);
}

inline SweepResult separation_sweep(const Scenario& base, const std::vector<double>& c_grid,
                                    const std::vector<FilterSpec>& filters,
                                    const SweepOptions& opts = {}) {
  if (c_grid.empty()) throw ConfigError("separation sweep needs a non-empty grid");
  SweepResult out;
  out.points.reserve(c_grid.size());
  for (double c : c_grid) {
    SweepPoint p;
    p.c = c;
    const Scenario sc = base.with_c(c);
    p.kl = scenario_kl(sc, opts.kl_samples, opts.kl_seed);
    p.mc = monte_carlo(sc, filters, opts.mc);
    out.points.push_back(std::move(p));
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.kl < b.kl; });
  return out;
}

}  // namespace gmkf
