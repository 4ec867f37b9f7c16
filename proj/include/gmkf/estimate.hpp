#pragma once

#include <Eigen/Dense>

#include "gmkf/common.hpp"

namespace gmkf {

/// State estimate as a single Gaussian.
template <int NX>
struct GaussianEstimateT {
  Eigen::Matrix<double, NX, 1> mean;
  Eigen::Matrix<double, NX, NX> cov;
};

using GaussianEstimate = GaussianEstimateT<Eigen::Dynamic>;

/// One (process component, measurement component) hypothesis after a full
/// predict/update cycle.
template <int NX, int NZ>
struct HypothesisState {
  int i = 0;  // process-noise component
  int j = 0;  // measurement-noise component
  Eigen::Matrix<double, NX, 1> pred_mean;
  Eigen::Matrix<double, NX, NX> pred_cov;
  Eigen::Matrix<double, NZ, 1> innovation;
  Eigen::Matrix<double, NZ, NZ> innovation_cov;
  Eigen::Matrix<double, NX, NZ> gain;
  Eigen::Matrix<double, NX, 1> post_mean;
  Eigen::Matrix<double, NX, NX> post_cov;
  double weight = 1.0;
  double loglik = 0.0;
};

}  // namespace gmkf
