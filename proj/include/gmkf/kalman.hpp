#pragma once

#include "gmkf/estimate.hpp"
#include "gmkf/gaussian.hpp"
#include "gmkf/linear_system.hpp"

namespace gmkf {

/// Standard predict/update with single Gaussian process and measurement
/// noise components (their weights are ignored).
inline GaussianEstimate kalman_step(const LinearSystem& sys, const GaussianEstimate& prior,
                                    const GaussianComponent& q, const GaussianComponent& r,
                                    const Vector& z, const Jitter& jitter = {}) {
  const Vector pred_mean = sys.F * prior.mean + q.mean;
  const Matrix pred_cov =
      symmetrized((q.cov + sys.F * prior.cov * sys.F.transpose()).eval());
  const Vector nu = z - (sys.H * pred_mean + r.mean);
  const Matrix s = symmetrized((sys.H * pred_cov * sys.H.transpose() + r.cov).eval());
  const auto llt = cholesky(s, jitter);
  const Matrix gain = llt.solve(sys.H * pred_cov).transpose();
  GaussianEstimate out;
  out.mean = pred_mean + gain * nu;
  out.cov = symmetrized((pred_cov - gain * s * gain.transpose()).eval());
  return out;
}

}  // namespace gmkf
