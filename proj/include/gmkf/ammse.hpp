#pragma once

#include <vector>

#include "gmkf/bank.hpp"

namespace gmkf {

/// Per-step quantities of the trace-minimizing gain solve. The gain of
/// hypothesis h decomposes into a part independent of the other hypotheses
/// (gain_base) plus the collective mean shift scaled by a per-hypothesis row
/// vector (shift_coeff). Hypotheses with negligible weight are skipped and
/// get a zero gain, which leaves their posterior at the prediction.
template <int NX, int NZ>
struct GainWorkspace {
  using StateVec = Eigen::Matrix<double, NX, 1>;
  using GainMat = Eigen::Matrix<double, NX, NZ>;
  using CoeffRow = Eigen::Matrix<double, 1, NZ>;

  StateVec weighted_noise_mean;  // sum of mu * (lifted process mean)
  StateVec mean_shift;           // weighted gain-innovation sum, solved for jointly
  double shift_denom = 1.0;
  std::vector<GainMat> gain_base;
  std::vector<CoeffRow> shift_coeff;
  std::vector<std::uint8_t> active;

  GainMat gain(int h) const { return gain_base[h] + mean_shift * shift_coeff[h]; }
};

/// Solve for the bank gains that minimize the trace of the merged posterior
/// covariance (individual covariances plus spread of means). Throws
/// NumericError when the scalar shift denominator is numerically singular;
/// callers may fall back to the mode-matched Kalman gains for the step.
template <int NX, int NZ>
GainWorkspace<NX, NZ> ammse_gains(const BankModel<NX, NZ>& m, const BankStep<NX, NZ>& step,
                                  double prune_threshold = 1e-12) {
  using Work = GainWorkspace<NX, NZ>;
  const int n = static_cast<int>(step.mu.size());
  Work ws;
  ws.weighted_noise_mean = m.process_means[0] * 0.0;
  for (int h = 0; h < n; ++h)
    ws.weighted_noise_mean += step.mu[h] * m.process_means[h / step.cw];

  ws.gain_base.assign(n, typename Work::GainMat(m.F.rows(), m.H.rows()));
  ws.shift_coeff.assign(n, typename Work::CoeffRow(m.H.rows()));
  ws.active.assign(n, 0);

  typename Work::StateVec shift_rhs = ws.weighted_noise_mean * 0.0;
  double denom = 1.0;
  for (int h = 0; h < n; ++h) {
    if (step.mu[h] < prune_threshold) {
      ws.gain_base[h].setZero();
      ws.shift_coeff[h].setZero();
      continue;
    }
    ws.active[h] = 1;
    const int i = h / step.cw;
    const auto& pred = step.preds[i];
    const auto& nu = step.innovations[h];
    const auto augmented =
        symmetrized((step.innovation_covs[h] + nu * nu.transpose()).eval());
    Eigen::LLT<Eigen::Matrix<double, NZ, NZ>> llt(augmented);
    if (llt.info() != Eigen::Success)
      throw NumericError("augmented innovation covariance is not positive definite");
    // base = (P H' + (U - u_i) nu') (S + nu nu')^{-1}, solved from the right
    const auto rhs_t =
        (m.H * pred.cov + nu * (ws.weighted_noise_mean - m.process_means[i]).transpose())
            .eval();
    ws.gain_base[h] = llt.solve(rhs_t).transpose();
    ws.shift_coeff[h] = llt.solve(nu).transpose();
    shift_rhs += step.mu[h] * (ws.gain_base[h] * nu);
    denom -= step.mu[h] * (ws.shift_coeff[h] * nu)(0, 0);
  }
  if (std::abs(denom) < 1e-12)
    throw NumericError("mean-shift denominator is numerically singular");
  ws.shift_denom = denom;
  ws.mean_shift = shift_rhs / denom;
  return ws;
}

/// Posterior of one hypothesis under an arbitrary (non-Kalman) gain; the
/// covariance uses the full four-term form.
template <int NX, int NZ>
HypothesisState<NX, NZ> ammse_update_one(const BankModel<NX, NZ>& m,
                                         const BankStep<NX, NZ>& step,
                                         const GainWorkspace<NX, NZ>& ws, int h) {
  const int i = h / step.cw;
  const auto& pred = step.preds[i];
  HypothesisState<NX, NZ> out;
  out.i = i;
  out.j = h % step.cw;
  out.pred_mean = pred.mean;
  out.pred_cov = pred.cov;
  out.innovation = step.innovations[h];
  out.innovation_cov = step.innovation_covs[h];
  out.weight = step.mu[h];
  out.loglik = step.logliks[h];
  if (!ws.active[h]) {
    out.gain = ws.gain_base[h];  // zero
    out.post_mean = pred.mean;
    out.post_cov = pred.cov;
    return out;
  }
  out.gain = ws.gain(h);
  out.post_mean = pred.mean + out.gain * out.innovation;
  const auto wh = (out.gain * (m.H * pred.cov)).eval();
  out.post_cov = symmetrized(
      (pred.cov - wh - wh.transpose() +
       out.gain * step.innovation_covs[h] * out.gain.transpose())
          .eval());
  return out;
}

template <int NX, int NZ>
std::vector<HypothesisState<NX, NZ>> ammse_update(const BankModel<NX, NZ>& m,
                                                  const BankStep<NX, NZ>& step,
                                                  const GainWorkspace<NX, NZ>& ws) {
  std::vector<HypothesisState<NX, NZ>> out;
  out.reserve(step.mu.size());
  for (int h = 0; h < static_cast<int>(step.mu.size()); ++h)
    out.push_back(ammse_update_one(m, step, ws, h));
  return out;
}

/// Conditional MSE of an estimate measured against the merged bank posterior:
/// the merged covariance plus the outer product of the mean offset.
inline Matrix ammse_mse(const GaussianEstimate& estimate, const GaussianEstimate& merged) {
  if (estimate.mean.size() != merged.mean.size())
    throw ConfigError("ammse_mse dimension mismatch");
  const Vector d = merged.mean - estimate.mean;
  return merged.cov + d * d.transpose();
}

}  // namespace gmkf
