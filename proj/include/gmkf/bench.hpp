#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "gmkf/filter.hpp"

namespace gmkf {

struct BenchRow {
  int cv = 1;
  int cw = 1;
  std::string filter;
  double update_stage_us = 0.0;  // median per-step time of gains+posterior+reduction
};

struct BenchResult {
  std::vector<BenchRow> rows;
  int state_dim = 2;
  int meas_dim = 1;

  double lookup(int bank, const std::string& filter) const {
    for (const auto& r : rows)
      if (r.cv * r.cw == bank && r.filter == filter) return r.update_stage_us;
    throw ConfigError("bench row not found");
  }
};

struct BenchOptions {
  int steps = 2000;  // timed steps per repetition
  int reps = 9;
  std::uint64_t seed = 99;
};

namespace detail {

/// Synthetic dynamic-dimension bank: distinct SPD covariances and mildly
/// separated means per component, sized (cv, cw) over (nx, nz).
inline BankModel<Eigen::Dynamic, Eigen::Dynamic> bench_model(int cv, int cw, int nx, int nz,
                                                             Rng& rng) {
  BankModel<Eigen::Dynamic, Eigen::Dynamic> m;
  m.F = Matrix::Identity(nx, nx);
  for (int r = 0; r + 1 < nx; ++r) m.F(r, r + 1) = 0.1;
  m.H = Matrix::Zero(nz, nx);
  for (int r = 0; r < nz; ++r) m.H(r, r) = 1.0;
  for (int i = 0; i < cv; ++i) {
    m.process_weights.push_back(1.0 / cv);
    Vector u(nx);
    for (int d = 0; d < nx; ++d) u[d] = 0.3 * rng.normal();
    m.process_means.push_back(u);
    Matrix a(nx, nx);
    for (int r = 0; r < nx; ++r)
      for (int c = 0; c < nx; ++c) a(r, c) = 0.2 * rng.normal();
    m.process_covs.push_back(symmetrized((a * a.transpose() + Matrix::Identity(nx, nx)).eval()));
  }
  for (int j = 0; j < cw; ++j) {
    m.meas_weights.push_back(1.0 / cw);
    Vector b(nz);
    for (int d = 0; d < nz; ++d) b[d] = 0.3 * rng.normal();
    m.meas_means.push_back(b);
    Matrix a(nz, nz);
    for (int r = 0; r < nz; ++r)
      for (int c = 0; c < nz; ++c) a(r, c) = 0.2 * rng.normal();
    m.meas_covs.push_back(symmetrized((a * a.transpose() + Matrix::Identity(nz, nz)).eval()));
  }
  return m;
}

}  // namespace detail

/// Median per-step wall time of the update stage (gains, posterior moments,
/// reduction) for each bank filter, with the shared prediction/innovation/
/// weight stage excluded. A volatile checksum keeps the work live.
inline BenchResult complexity_bench(const std::vector<std::pair<int, int>>& bank_sizes,
                                    std::pair<int, int> dims, const BenchOptions& opts = {}) {
  using Clock = std::chrono::steady_clock;
  const int nx = dims.first;
  const int nz = dims.second;
  BenchResult result;
  result.state_dim = nx;
  result.meas_dim = nz;

  const std::vector<FilterSpec> variants = {
      {FilterKind::Gsf, ReductionScheme::Merge},
      {FilterKind::Gsf, ReductionScheme::Remove},
      {FilterKind::Ammse, ReductionScheme::Merge},
      {FilterKind::Ammse, ReductionScheme::Remove},
  };

  volatile double checksum = 0.0;
  for (const auto& [cv, cw] : bank_sizes) {
    Rng model_rng(opts.seed);
    const auto model = detail::bench_model(cv, cw, nx, nz, model_rng);

    // one measurement sequence reused by every variant
    Rng rng(opts.seed + 1);
    std::vector<Vector> zs(opts.steps);
    for (auto& z : zs) {
      z.resize(nz);
      for (int d = 0; d < nz; ++d) z[d] = rng.normal();
    }

    for (const auto& variant : variants) {
      std::vector<double> reps_us;
      for (int rep = 0; rep < opts.reps; ++rep) {
        GaussianEstimateT<Eigen::Dynamic> est;
        est.mean = Vector::Zero(nx);
        est.cov = Matrix::Identity(nx, nx);
        std::chrono::nanoseconds timed{0};
        for (int k = 0; k < opts.steps; ++k) {
          const auto step = bank_stage1(model, est, zs[k]);
          const auto t0 = Clock::now();
          if (variant.kind == FilterKind::Gsf) {
            if (variant.scheme == ReductionScheme::Merge) {
              const auto bank = gsf_update(model, step);
              est = reduce(bank, ReductionScheme::Merge);
            } else {
              const auto hyp = gsf_update_one(model, step, argmax_weight(step.mu));
              est.mean = hyp.post_mean;
              est.cov = hyp.post_cov;
            }
          } else {
            const auto ws = ammse_gains(model, step);
            if (variant.scheme == ReductionScheme::Merge) {
              const auto bank = ammse_update(model, step, ws);
              est = reduce(bank, ReductionScheme::Merge);
            } else {
              const auto hyp = ammse_update_one(model, step, ws, argmax_weight(step.mu));
              est.mean = hyp.post_mean;
              est.cov = hyp.post_cov;
            }
          }
          timed += Clock::now() - t0;
          checksum = checksum + est.mean[0];
        }
        reps_us.push_back(
            std::chrono::duration<double, std::micro>(timed).count() / opts.steps);
      }
      std::sort(reps_us.begin(), reps_us.end());
      BenchRow row;
      row.cv = cv;
      row.cw = cw;
      row.filter = variant.name();
      row.update_stage_us = reps_us[reps_us.size() / 2];
      result.rows.push_back(row);
    }
  }
  (void)checksum;
  return result;
}

/// R^2 of the least-squares line through (x, y).
inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double fit = slope * x[k] + intercept;
    ss_res += (y[k] - fit) * (y[k] - fit);
    ss_tot += (y[k] - ybar) * (y[k] - ybar);
  }
  return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

/// Slope of the least-squares line through (log x, log y).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gmkf
