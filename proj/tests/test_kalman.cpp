#include <gtest/gtest.h>

#include "gmkf/kalman.hpp"
#include "gmkf/rng.hpp"

using namespace gmkf;

namespace {

// Textbook predict/update written independently with explicit inverses.
GaussianEstimate reference_step(const LinearSystem& sys, const GaussianEstimate& prior,
                                const GaussianComponent& q, const GaussianComponent& r,
                                const Vector& z) {
  const Vector xp = sys.F * prior.mean + q.mean;
  const Matrix pp = q.cov + sys.F * prior.cov * sys.F.transpose();
  const Vector nu = z - (sys.H * xp + r.mean);
  const Matrix s = sys.H * pp * sys.H.transpose() + r.cov;
  const Matrix w = pp * sys.H.transpose() * s.inverse();
  GaussianEstimate out;
  out.mean = xp + w * nu;
  out.cov = pp - w * s * w.transpose();
  return out;
}

Matrix random_spd(Rng& rng, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return symmetrized((a * a.transpose() + 0.3 * Matrix::Identity(n, n)).eval());
}

}  // namespace

TEST(KalmanStep, ScalarTextbookUpdate) {
  LinearSystem sys;
  sys.F = Matrix::Identity(1, 1);
  sys.H = Matrix::Identity(1, 1);
  sys.dt = 1.0;
  const GaussianEstimate prior{Vector::Zero(1), Matrix::Identity(1, 1)};
  const GaussianComponent q{1.0, Vector::Zero(1), Matrix::Zero(1, 1)};
  const GaussianComponent r{1.0, Vector::Zero(1), Matrix::Identity(1, 1)};
  const auto post = kalman_step(sys, prior, q, r, Vector::Ones(1));
  EXPECT_NEAR(post.mean(0), 0.5, 1e-15);
  EXPECT_NEAR(post.cov(0, 0), 0.5, 1e-15);
}

TEST(KalmanStep, UninformativeMeasurementKeepsPrediction) {
  LinearSystem sys = position_velocity_system(0.5);
  sys.H = Matrix::Zero(1, 2);
  const GaussianEstimate prior{Vector{{1.0, -1.0}}, 2.0 * Matrix::Identity(2, 2)};
  const GaussianComponent q{1.0, Vector::Zero(2), 0.1 * Matrix::Identity(2, 2)};
  const GaussianComponent r{1.0, Vector::Zero(1), Matrix::Identity(1, 1)};
  const auto post = kalman_step(sys, prior, q, r, Vector{{7.0}});
  const Vector pred_mean = sys.F * prior.mean;
  const Matrix pred_cov = q.cov + sys.F * prior.cov * sys.F.transpose();
  EXPECT_LT((post.mean - pred_mean).norm(), 1e-14);
  EXPECT_LT((post.cov - pred_cov).norm(), 1e-14);
}

TEST(KalmanStep, MatchesReferenceOnRandomInstances) {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    LinearSystem sys;
    sys.F = Matrix(2, 2);
    sys.H = Matrix(1, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) sys.F(i, j) = rng.normal();
    sys.H << rng.normal(), rng.normal();
    sys.dt = 1.0;
    const GaussianEstimate prior{Vector{{rng.normal(), rng.normal()}}, random_spd(rng, 2)};
    const GaussianComponent q{1.0, Vector{{rng.normal(), rng.normal()}}, random_spd(rng, 2)};
    const GaussianComponent r{1.0, Vector{{rng.normal()}}, random_spd(rng, 1)};
    const Vector z{{rng.normal()}};

    const auto got = kalman_step(sys, prior, q, r, z);
    const auto want = reference_step(sys, prior, q, r, z);
    EXPECT_LT((got.mean - want.mean).norm(), 1e-11);
    EXPECT_LT((got.cov - want.cov).norm(), 1e-11);
  }
}

TEST(KalmanStep, RejectsSingularInnovationCovariance) {
  LinearSystem sys;
  sys.F = Matrix::Identity(1, 1);
  sys.H = Matrix::Identity(1, 1);
  const GaussianEstimate prior{Vector::Zero(1), Matrix::Zero(1, 1)};
  const GaussianComponent q{1.0, Vector::Zero(1), Matrix::Zero(1, 1)};
  const GaussianComponent r{1.0, Vector::Zero(1), Matrix::Zero(1, 1)};
  EXPECT_THROW(kalman_step(sys, prior, q, r, Vector::Zero(1)), NumericError);
}
