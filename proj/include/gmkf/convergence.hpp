#pragma once

#include <vector>

#include "gmkf/monte_carlo.hpp"

namespace gmkf {

/// Gain and estimate gaps between the trace-minimizing and the mode-matched
/// Kalman bank on a single constructed step whose innovations are `delta`
/// apart at the widest.
struct SpreadLadderRow {
  double delta = 0.0;         // requested max pairwise innovation distance
  double gain_gap = 0.0;      // max Frobenius gap over hypotheses
  double estimate_gap = 0.0;  // merged-mean gap
};

/// Behaviour as the component separation grows: the heaviest hypothesis
/// weight and the worst per-step distance of the merged estimates from the
/// label-matched filter over a common trajectory.
struct SeparationLadderRow {
  double c = 0.0;
  double min_separation_sigma = 0.0;  // min pairwise innovation offset / sqrt(max S)
  double min_max_weight = 1.0;        // smallest per-step max hypothesis weight
  double ammse_gap = 0.0;             // max per-step |merged mean - matched mean|
  double gsf_gap = 0.0;
};

struct ConvergenceProbe {
  std::vector<SpreadLadderRow> spread_ladder;
  std::vector<SeparationLadderRow> separation_ladder;
};

struct ProbeOptions {
  int horizon = 200;
  /// Steps ignored at the start of the separation ladder. Under the diffuse
  /// initial covariance the first innovation covariances are enormous, so no
  /// filter can resolve hypotheses there regardless of the separation.
  int burn_in = 20;
  std::uint64_t seed = 7;
  FilterOptions filter{};
};

namespace detail {

/// Fixed single-step bank state used by the spread ladder: a mid-run prior
/// and a measurement about one sigma off the prediction.
inline void spread_ladder_state(GaussianEstimateT<2>& prior, double& z) {
  prior.mean = Eigen::Vector2d(0.3, -0.2);
  prior.cov = (Eigen::Matrix2d() << 0.5, 0.1, 0.1, 0.4).finished();
  z = 0.7;
}

}  // namespace detail

/// Case ladder toward coincident innovations: scales the mixture mean
/// patterns of `base` (component variances must be equal) so the widest
/// pairwise innovation distance equals each requested delta, then compares
/// the two gain sets on one deterministic step.
inline std::vector<SpreadLadderRow> innovation_spread_ladder(
    const Scenario& base, const std::vector<double>& deltas, const FilterOptions& opts = {}) {
  GaussianEstimateT<2> prior;
  double z_value = 0.0;
  detail::spread_ladder_state(prior, z_value);
  const Eigen::Matrix<double, 1, 1> z{{z_value}};

  // Innovation offsets scale linearly with the mean pattern: dt * u_i + b_j.
  const Scenario unit = base.with_c(1.0);
  const NoiseModel unit_noise = unit.noise();
  double span = 0.0;
  {
    std::vector<double> offsets;
    for (const auto& pc : unit_noise.process.components())
      for (const auto& mc : unit_noise.measurement.components())
        offsets.push_back(unit.dt * pc.mean(0) + mc.mean(0));
    for (double a : offsets)
      for (double b : offsets) span = std::max(span, std::abs(a - b));
  }
  if (span <= 0.0) throw ConfigError("spread ladder needs separable component means");

  std::vector<SpreadLadderRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    const Scenario sc = base.with_c(delta / span);
    const auto model = make_bank_model<2, 1>(sc.system(), sc.noise());
    const auto step = bank_stage1(model, prior, z, opts.jitter);
    const auto ws = ammse_gains(model, step, opts.prune_threshold);

    SpreadLadderRow row;
    row.delta = delta;
    const auto gsf_bank = gsf_update(model, step);
    const auto ammse_bank = ammse_update(model, step, ws);
    for (std::size_t h = 0; h < gsf_bank.size(); ++h) {
      if (!ws.active[h]) continue;
      row.gain_gap =
          std::max(row.gain_gap, (ammse_bank[h].gain - gsf_bank[h].gain).norm());
    }
    row.estimate_gap = (reduce(ammse_bank, ReductionScheme::Merge).mean -
                        reduce(gsf_bank, ReductionScheme::Merge).mean)
                           .norm();
    rows.push_back(row);
  }
  return rows;
}

/// Case ladder toward fully separated components over a labeled trajectory.
inline std::vector<SeparationLadderRow> separation_ladder(const Scenario& base,
                                                          const std::vector<double>& c_grid,
                                                          const ProbeOptions& opts = {}) {
  std::vector<SeparationLadderRow> rows;
  rows.reserve(c_grid.size());
  for (double c : c_grid) {
    Scenario sc = base.with_c(c);
    sc.horizon = opts.horizon;
    sc.seed = opts.seed;
    const auto model = make_bank_model<2, 1>(sc.system(), sc.noise());
    Rng rng(sc.seed);
    const Trajectory traj = generate_trajectory(sc, rng);
    std::vector<Eigen::Matrix<double, 1, 1>> zs(traj.measurements.size());
    for (std::size_t k = 0; k < zs.size(); ++k) zs[k](0, 0) = traj.measurements[k](0);

    const auto matched = run_filter<2, 1>(FilterKind::Matched, ReductionScheme::Merge, model,
                                          zs, &traj.labels, opts.filter);
    const auto gsf = run_filter<2, 1>(FilterKind::Gsf, ReductionScheme::Merge, model, zs,
                                      &traj.labels, opts.filter);
    const auto ammse = run_filter<2, 1>(FilterKind::Ammse, ReductionScheme::Merge, model, zs,
                                        &traj.labels, opts.filter);

    SeparationLadderRow row;
    row.c = c;

    // min pairwise innovation-offset distance, in units of the widest
    // innovation standard deviation seen after burn-in
    double min_offset = std::numeric_limits<double>::infinity();
    const int cv = static_cast<int>(model.process_weights.size());
    const int cw = static_cast<int>(model.meas_weights.size());
    const NoiseModel noise = sc.noise();
    std::vector<double> offsets;
    offsets.reserve(cv * cw);
    for (int i = 0; i < cv; ++i)
      for (int j = 0; j < cw; ++j)
        offsets.push_back(sc.dt * noise.process.component(i).mean(0) +
                          noise.measurement.component(j).mean(0));
    for (std::size_t a = 0; a < offsets.size(); ++a)
      for (std::size_t b = a + 1; b < offsets.size(); ++b)
        min_offset = std::min(min_offset, std::abs(offsets[a] - offsets[b]));

    double max_s = 0.0;
    {
      GaussianEstimateT<2> est;
      est.mean = Eigen::Vector2d::Zero();
      est.cov = 1e3 * Eigen::Matrix2d::Identity();
      for (std::size_t k = 0; k < zs.size(); ++k) {
        const auto step = bank_stage1(model, est, zs[k], opts.filter.jitter);
        if (k >= static_cast<std::size_t>(opts.burn_in))
          for (const auto& s : step.innovation_covs) max_s = std::max(max_s, s(0, 0));
        est = reduce(gsf_update(model, step), ReductionScheme::Merge);
      }
    }
    row.min_separation_sigma = min_offset / std::sqrt(max_s);

    const std::size_t first = std::min<std::size_t>(opts.burn_in, zs.size());
    for (std::size_t k = first; k < zs.size(); ++k) {
      row.min_max_weight = std::min(row.min_max_weight, gsf.diagnostics[k].max_weight);
      row.ammse_gap = std::max(
          row.ammse_gap, (ammse.estimates[k].mean - matched.estimates[k].mean).norm());
      row.gsf_gap = std::max(row.gsf_gap,
                             (gsf.estimates[k].mean - matched.estimates[k].mean).norm());
    }
    rows.push_back(row);
  }
  return rows;
}

inline ConvergenceProbe convergence_probe(const Scenario& base,
                                          const std::vector<double>& deltas,
                                          const std::vector<double>& c_grid,
                                          const ProbeOptions& opts = {}) {
  ConvergenceProbe probe;
  probe.spread_ladder = innovation_spread_ladder(base, deltas, opts.filter);
  probe.separation_ladder = separation_ladder(base, c_grid, opts);
  return probe;
}

}  // namespace gmkf
