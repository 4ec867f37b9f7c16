#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmkf/ammse.hpp"
#include "gmkf/bank.hpp"
#include "gmkf/kalman.hpp"
#include "gmkf/reduction.hpp"

namespace gmkf {

enum class FilterKind { Kalman, Gsf, Ammse, Matched };

inline std::string filter_name(FilterKind kind, ReductionScheme scheme) {
  switch (kind) {
    case FilterKind::Kalman:
      return "kalman";
    case FilterKind::Matched:
      return "matched";
    case FilterKind::Gsf:
      return scheme == ReductionScheme::Merge ? "gsf-merge" : "gsf-remove";
    case FilterKind::Ammse:
      return scheme == ReductionScheme::Merge ? "ammse-merge" : "ammse-remove";
  }
  return "?";
}

/// A filter identity: the kind plus the reduction scheme it runs with.
struct FilterSpec {
  FilterKind kind = FilterKind::Kalman;
  ReductionScheme scheme = ReductionScheme::Merge;

  std::string name() const { return filter_name(kind, scheme); }
  bool operator==(const FilterSpec&) const = default;
};

struct FilterOptions {
  Jitter jitter{};
  double prune_threshold = 1e-12;
  /// Fall back to mode-matched Kalman gains for a step whose mean-shift
  /// denominator is singular, instead of failing the run.
  bool gsf_gain_fallback = true;
  /// Initial estimate; defaults to zero mean with a diffuse 1e3 * I
  /// covariance when unset.
  std::optional<GaussianEstimate> prior;
};

struct StepDiagnostics {
  double max_weight = 1.0;
  bool gain_fallback = false;
  double mean_spread = 0.0;  // merge schemes only
};

struct FilterResult {
  std::vector<GaussianEstimate> estimates;
  std::vector<StepDiagnostics> diagnostics;
  int fallback_steps = 0;
};

inline GaussianEstimate diffuse_prior(int n) {
  return {Vector::Zero(n), 1e3 * Matrix::Identity(n, n)};
}

/// One mode-matched Kalman update using the labeled active components.
inline GaussianEstimate matched_step(const LinearSystem& sys, const NoiseModel& noise,
                                     const GaussianEstimate& prior, int label_i, int label_j,
                                     const Vector& z, const Jitter& jitter = {}) {
  const GaussianMixture proc = lifted_process(noise, sys.dt);
  return kalman_step(sys, prior, proc.component(label_i),
                     noise.measurement.component(label_j), z, jitter);
}

namespace detail {

template <int NX, int NZ>
GaussianEstimateT<NX> fixed_prior(const FilterOptions& opts, int n) {
  GaussianEstimateT<NX> est;
  if (opts.prior) {
    if (opts.prior->mean.size() != n) throw ConfigError("prior dimension mismatch");
    est.mean = opts.prior->mean;
    est.cov = opts.prior->cov;
  } else {
    est.mean = Eigen::Matrix<double, NX, 1>::Zero(n);
    est.cov = 1e3 * Eigen::Matrix<double, NX, NX>::Identity(n, n);
  }
  return est;
}

}  // namespace detail

/// Run a filter over a measurement sequence. The bank is first order: every
/// step rebuilds the hypotheses from the single reduced estimate of the
/// previous step. Labels are required for the Matched kind and ignored
/// otherwise; the Kalman kind ignores the reduction scheme.
template <int NX, int NZ>
FilterResult run_filter(FilterKind kind, ReductionScheme scheme, const BankModel<NX, NZ>& model,
                        const std::vector<Eigen::Matrix<double, NZ, 1>>& measurements,
                        const std::vector<std::pair<int, int>>* labels,
                        const FilterOptions& opts = {}) {
  if (measurements.empty()) throw ConfigError("measurement sequence is empty");
  if (kind == FilterKind::Matched &&
      (labels == nullptr || labels->size() != measurements.size()))
    throw DataError("matched filter requires one (i, j) label per measurement");

  const BankModel<NX, NZ> kalman_model =
      kind == FilterKind::Kalman ? moment_matched_model(model) : BankModel<NX, NZ>{};

  const int n = static_cast<int>(model.F.rows());
  GaussianEstimateT<NX> est = detail::fixed_prior<NX, NZ>(opts, n);

  FilterResult result;
  result.estimates.reserve(measurements.size());
  result.diagnostics.reserve(measurements.size());

  for (std::size_t k = 0; k < measurements.size(); ++k) {
    StepDiagnostics diag;
    try {
      const BankModel<NX, NZ>* active = &model;
      BankModel<NX, NZ> matched;
      if (kind == FilterKind::Kalman) {
        active = &kalman_model;
      } else if (kind == FilterKind::Matched) {
        matched = single_hypothesis_model(model, (*labels)[k].first, (*labels)[k].second);
        active = &matched;
      }

      BankStep<NX, NZ> step = bank_stage1(*active, est, measurements[k], opts.jitter);
      diag.max_weight = *std::max_element(step.mu.begin(), step.mu.end());

      const bool merge = scheme == ReductionScheme::Merge && kind != FilterKind::Kalman &&
                         kind != FilterKind::Matched;
      if (kind == FilterKind::Ammse) {
        std::optional<GainWorkspace<NX, NZ>> ws;
        try {
          ws = ammse_gains(*active, step, opts.prune_threshold);
        } catch (const NumericError&) {
          if (!opts.gsf_gain_fallback) throw;
          diag.gain_fallback = true;
          ++result.fallback_steps;
        }
        if (merge) {
          const auto bank = ws ? ammse_update(*active, step, *ws) : gsf_update(*active, step);
          const auto reduced = reduce(bank, ReductionScheme::Merge);
          diag.mean_spread = mean_spread(bank, reduced);
          est = reduced;
        } else {
          const int h = argmax_weight(step.mu);
          const auto hyp =
              ws ? ammse_update_one(*active, step, *ws, h) : gsf_update_one(*active, step, h);
          est = {hyp.post_mean, hyp.post_cov};
        }
      } else if (merge) {
        const auto bank = gsf_update(*active, step);
        const auto reduced = reduce(bank, ReductionScheme::Merge);
        diag.mean_spread = mean_spread(bank, reduced);
        est = reduced;
      } else {
        const int h = argmax_weight(step.mu);
        const auto hyp = gsf_update_one(*active, step, h);
        est = {hyp.post_mean, hyp.post_cov};
      }
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(k) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("step " + std::to_string(k) + ": " + e.what());
    }
    result.estimates.push_back({Vector(est.mean), Matrix(est.cov)});
    result.diagnostics.push_back(diag);
  }
  return result;
}

/// Dynamic-dimension entry point; dispatches to the fixed (2, 1) kernel used
/// by the per-axis tracking scenarios when the shapes allow.
inline FilterResult run_filter(FilterKind kind, ReductionScheme scheme, const LinearSystem& sys,
                               const NoiseModel& noise, const std::vector<Vector>& measurements,
                               const std::vector<std::pair<int, int>>* labels = nullptr,
                               const FilterOptions& opts = {}) {
  if (sys.state_dim() == 2 && sys.meas_dim() == 1) {
    const auto model = make_bank_model<2, 1>(sys, noise);
    std::vector<Eigen::Matrix<double, 1, 1>> zs(measurements.size());
    for (std::size_t k = 0; k < measurements.size(); ++k) {
      if (measurements[k].size() != 1) throw ConfigError("measurement dimension mismatch");
      zs[k](0, 0) = measurements[k](0);
    }
    return run_filter<2, 1>(kind, scheme, model, zs, labels, opts);
  }
  const auto model = make_bank_model<Eigen::Dynamic, Eigen::Dynamic>(sys, noise);
  return run_filter<Eigen::Dynamic, Eigen::Dynamic>(kind, scheme, model, measurements, labels,
                                                    opts);
}

}  // namespace gmkf
