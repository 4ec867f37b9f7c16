#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace gmkf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid configuration, schema violation, or bad argument.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Required input data is missing or malformed (labels, CSV columns, files).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical operation cannot proceed (non-SPD matrix, singular solve).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Diagonal regularization applied before a Cholesky factorization when the
/// plain factorization fails. Disabled by default.
struct Jitter {
  bool enabled = false;
  double eps = 1e-9;
};

template <typename Mat>
Mat symmetrized(const Mat& m) {
  return 0.5 * (m + m.transpose());
}

/// Cholesky factorization with optional jitter retry.
template <typename Mat>
Eigen::LLT<Mat> cholesky(const Mat& m, const Jitter& jitter = {}) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  if (jitter.enabled) {
    Mat bumped = m + jitter.eps * Mat::Identity(m.rows(), m.cols());
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericError("matrix is not positive definite");
}

template <typename Mat>
double logdet_from_llt(const Eigen::LLT<Mat>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline double log_sum_exp(std::span<const double> values) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace gmkf
