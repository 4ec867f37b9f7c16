#pragma once

#include <vector>

#include "gmkf/estimate.hpp"
#include "gmkf/linear_system.hpp"
#include "gmkf/noise_model.hpp"

namespace gmkf {

/// Noise model compiled into the fixed-dimension form the filter bank runs
/// on. NX/NZ may be Eigen::Dynamic.
template <int NX, int NZ>
struct BankModel {
  using StateVec = Eigen::Matrix<double, NX, 1>;
  using StateMat = Eigen::Matrix<double, NX, NX>;
  using MeasVec = Eigen::Matrix<double, NZ, 1>;
  using MeasMat = Eigen::Matrix<double, NZ, NZ>;
  using GainMat = Eigen::Matrix<double, NX, NZ>;
  using ObsMat = Eigen::Matrix<double, NZ, NX>;

  StateMat F;
  ObsMat H;
  std::vector<double> process_weights;
  std::vector<StateVec> process_means;  // lifted into state space
  std::vector<StateMat> process_covs;
  std::vector<double> meas_weights;
  std::vector<MeasVec> meas_means;
  std::vector<MeasMat> meas_covs;

  int hypotheses() const {
    return static_cast<int>(process_weights.size() * meas_weights.size());
  }
};

template <int NX, int NZ>
BankModel<NX, NZ> make_bank_model(const LinearSystem& sys, const NoiseModel& noise) {
  sys.validate();
  const GaussianMixture proc = lifted_process(noise, sys.dt);
  if (proc.dim() != sys.state_dim())
    throw ConfigError("process noise dimension does not match state");
  if (noise.measurement.dim() != sys.meas_dim())
    throw ConfigError("measurement noise dimension does not match measurement");

  BankModel<NX, NZ> m;
  m.F = sys.F;
  m.H = sys.H;
  for (const auto& c : proc.components()) {
    m.process_weights.push_back(c.weight);
    m.process_means.emplace_back(c.mean);
    m.process_covs.emplace_back(c.cov);
  }
  for (const auto& c : noise.measurement.components()) {
    m.meas_weights.push_back(c.weight);
    m.meas_means.emplace_back(c.mean);
    m.meas_covs.emplace_back(c.cov);
  }
  return m;
}

/// Collapse both noise mixtures to their moment-matched Gaussians (the
/// single-filter baseline).
template <int NX, int NZ>
BankModel<NX, NZ> moment_matched_model(const BankModel<NX, NZ>& m) {
  BankModel<NX, NZ> out;
  out.F = m.F;
  out.H = m.H;

  typename BankModel<NX, NZ>::StateVec u = m.process_means[0] * 0.0;
  for (std::size_t i = 0; i < m.process_weights.size(); ++i)
    u += m.process_weights[i] * m.process_means[i];
  typename BankModel<NX, NZ>::StateMat q = m.process_covs[0] * 0.0;
  for (std::size_t i = 0; i < m.process_weights.size(); ++i) {
    const auto d = (m.process_means[i] - u).eval();
    q += m.process_weights[i] * (m.process_covs[i] + d * d.transpose());
  }
  out.process_weights = {1.0};
  out.process_means = {u};
  out.process_covs = {symmetrized(q)};

  typename BankModel<NX, NZ>::MeasVec b = m.meas_means[0] * 0.0;
  for (std::size_t j = 0; j < m.meas_weights.size(); ++j)
    b += m.meas_weights[j] * m.meas_means[j];
  typename BankModel<NX, NZ>::MeasMat r = m.meas_covs[0] * 0.0;
  for (std::size_t j = 0; j < m.meas_weights.size(); ++j) {
    const auto d = (m.meas_means[j] - b).eval();
    r += m.meas_weights[j] * (m.meas_covs[j] + d * d.transpose());
  }
  out.meas_weights = {1.0};
  out.meas_means = {b};
  out.meas_covs = {symmetrized(r)};
  return out;
}

/// Restriction of the bank to one (i, j) hypothesis with unit weight.
template <int NX, int NZ>
BankModel<NX, NZ> single_hypothesis_model(const BankModel<NX, NZ>& m, int i, int j) {
  BankModel<NX, NZ> out;
  out.F = m.F;
  out.H = m.H;
  out.process_weights = {1.0};
  out.process_means = {m.process_means.at(i)};
  out.process_covs = {m.process_covs.at(i)};
  out.meas_weights = {1.0};
  out.meas_means = {m.meas_means.at(j)};
  out.meas_covs = {m.meas_covs.at(j)};
  return out;
}

template <int NX>
struct Prediction {
  Eigen::Matrix<double, NX, 1> mean;
  Eigen::Matrix<double, NX, NX> cov;
};

/// Shared per-step quantities: predictions per process component,
/// innovations, factored innovation covariances, likelihoods and weights per
/// hypothesis. Hypotheses are indexed row-major as i * C_w + j.
template <int NX, int NZ>
struct BankStep {
  int cv = 0;
  int cw = 0;
  std::vector<Prediction<NX>> preds;
  std::vector<Eigen::Matrix<double, NZ, 1>> innovations;
  std::vector<Eigen::Matrix<double, NZ, NZ>> innovation_covs;
  std::vector<Eigen::LLT<Eigen::Matrix<double, NZ, NZ>>> factors;
  std::vector<double> logliks;
  std::vector<double> mu;

  int index(int i, int j) const { return i * cw + j; }
};

/// One prediction per process component: x + u_i under F, covariance
/// Q_i + F P F'.
template <int NX, int NZ>
std::vector<Prediction<NX>> bank_predict(const BankModel<NX, NZ>& m,
                                         const GaussianEstimateT<NX>& prior) {
  std::vector<Prediction<NX>> preds(m.process_weights.size());
  const auto fpf = symmetrized((m.F * prior.cov * m.F.transpose()).eval());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    preds[i].mean = m.F * prior.mean + m.process_means[i];
    preds[i].cov = m.process_covs[i] + fpf;
  }
  return preds;
}

/// Innovations, their covariances (factored once, reused for gains), and
/// per-hypothesis log-likelihoods of the measurement.
template <int NX, int NZ>
void bank_innovations(const BankModel<NX, NZ>& m, const std::vector<Prediction<NX>>& preds,
                      const Eigen::Matrix<double, NZ, 1>& z, BankStep<NX, NZ>& step,
                      const Jitter& jitter = {}) {
  const int cv = static_cast<int>(m.process_weights.size());
  const int cw = static_cast<int>(m.meas_weights.size());
  const int n = cv * cw;
  step.cv = cv;
  step.cw = cw;
  step.innovations.resize(n);
  step.innovation_covs.resize(n);
  step.factors.resize(n);
  step.logliks.resize(n);
  const double logtau = std::log(2.0 * kPi);
  const double nz = static_cast<double>(z.size());
  for (int i = 0; i < cv; ++i) {
    const auto hx = (m.H * preds[i].mean).eval();
    const auto hph = symmetrized((m.H * preds[i].cov * m.H.transpose()).eval());
    for (int j = 0; j < cw; ++j) {
      const int h = i * cw + j;
      step.innovations[h] = z - hx - m.meas_means[j];
      step.innovation_covs[h] = hph + m.meas_covs[j];
      step.factors[h] = cholesky(step.innovation_covs[h], jitter);
      const double qf = step.factors[h].matrixL().solve(step.innovations[h]).squaredNorm();
      step.logliks[h] = -0.5 * (nz * logtau + logdet_from_llt(step.factors[h]) + qf);
    }
  }
}

/// Posterior hypothesis weights from prior component weights and measurement
/// log-likelihoods, normalized in log space.
inline std::vector<double> update_mode_probabilities(const std::vector<double>& process_weights,
                                                     const std::vector<double>& meas_weights,
                                                     const std::vector<double>& logliks) {
  const int cv = static_cast<int>(process_weights.size());
  const int cw = static_cast<int>(meas_weights.size());
  if (static_cast<int>(logliks.size()) != cv * cw)
    throw ConfigError("log-likelihood count does not match hypothesis count");
  std::vector<double> logw(cv * cw);
  for (int i = 0; i < cv; ++i)
    for (int j = 0; j < cw; ++j)
      logw[i * cw + j] =
          std::log(process_weights[i]) + std::log(meas_weights[j]) + logliks[i * cw + j];
  const double norm = log_sum_exp(logw);
  if (!std::isfinite(norm)) throw NumericError("measurement impossible under every hypothesis");
  std::vector<double> mu(logw.size());
  for (std::size_t h = 0; h < logw.size(); ++h) mu[h] = std::exp(logw[h] - norm);
  return mu;
}

/// Prediction + innovation + weight stage shared by every bank filter.
template <int NX, int NZ>
BankStep<NX, NZ> bank_stage1(const BankModel<NX, NZ>& m, const GaussianEstimateT<NX>& prior,
                             const Eigen::Matrix<double, NZ, 1>& z, const Jitter& jitter = {}) {
  BankStep<NX, NZ> step;
  step.preds = bank_predict(m, prior);
  bank_innovations(m, step.preds, z, step, jitter);
  step.mu = update_mode_probabilities(m.process_weights, m.meas_weights, step.logliks);
  return step;
}

/// Index of the heaviest hypothesis; ties resolve to the lowest (i, j).
inline int argmax_weight(const std::vector<double>& mu) {
  int best = 0;
  for (int h = 1; h < static_cast<int>(mu.size()); ++h)
    if (mu[h] > mu[best]) best = h;
  return best;
}

template <int NX, int NZ>
HypothesisState<NX, NZ> gsf_update_one(const BankModel<NX, NZ>& m, const BankStep<NX, NZ>& step,
                                       int h) {
  const int i = h / step.cw;
  const int j = h % step.cw;
  const auto& pred = step.preds[i];
  HypothesisState<NX, NZ> out;
  out.i = i;
  out.j = j;
  out.pred_mean = pred.mean;
  out.pred_cov = pred.cov;
  out.innovation = step.innovations[h];
  out.innovation_cov = step.innovation_covs[h];
  // W = P H' S^{-1}, reusing the stage-1 factorization of S
  out.gain = step.factors[h].solve(m.H * pred.cov).transpose();
  out.post_mean = pred.mean + out.gain * out.innovation;
  out.post_cov = symmetrized(
      (pred.cov - out.gain * step.innovation_covs[h] * out.gain.transpose()).eval());
  out.weight = step.mu[h];
  out.loglik = step.logliks[h];
  return out;
}

/// Mode-matched Kalman updates for every hypothesis.
template <int NX, int NZ>
std::vector<HypothesisState<NX, NZ>> gsf_update(const BankModel<NX, NZ>& m,
                                                const BankStep<NX, NZ>& step) {
  std::vector<HypothesisState<NX, NZ>> out;
  out.reserve(step.mu.size());
  for (int h = 0; h < static_cast<int>(step.mu.size()); ++h)
    out.push_back(gsf_update_one(m, step, h));
  return out;
}

}  // namespace gmkf
