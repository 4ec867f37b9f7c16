#include <gtest/gtest.h>

#include "gmkf/bank.hpp"
#include "gmkf/kalman.hpp"
#include "gmkf/rng.hpp"

using namespace gmkf;
using Model21 = BankModel<2, 1>;

namespace {

NoiseModel scalar_noise(std::vector<double> pw, std::vector<double> pm, std::vector<double> pv,
                        std::vector<double> mw, std::vector<double> mm,
                        std::vector<double> mv) {
  return NoiseModel{GaussianMixture::scalar(pw, pm, pv), GaussianMixture::scalar(mw, mm, mv),
                    ProcessEmbedding::RandomWalkVelocity};
}

NoiseModel model2_noise(double c) {
  const std::vector<double> w = {0.1, 0.1, 0.6, 0.1, 0.1};
  const std::vector<double> m = {-50 * c, -30 * c, 0, 30 * c, 50 * c};
  const std::vector<double> v = {1, 1, 1, 1, 1};
  return scalar_noise(w, m, v, w, m, v);
}

}  // namespace

TEST(BankPredict, IdentityDynamicsZeroPrior) {
  // F = I, P = 0, Q_i = I for every i -> every predicted covariance is I
  LinearSystem sys;
  sys.F = Matrix::Identity(2, 2);
  sys.H = Matrix{{1.0, 0.0}};
  sys.dt = 1.0;
  std::vector<GaussianComponent> comps(3);
  for (int i = 0; i < 3; ++i)
    comps[i] = {1.0 / 3, Vector{{double(i), 0.0}}, Matrix::Identity(2, 2)};
  NoiseModel noise{GaussianMixture(comps), GaussianMixture::scalar({1}, {0}, {1}),
                   ProcessEmbedding::None};
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean.setZero();
  prior.cov.setZero();
  const auto preds = bank_predict(model, prior);
  ASSERT_EQ(preds.size(), 3u);
  for (const auto& p : preds)
    EXPECT_LT((p.cov - Eigen::Matrix2d::Identity()).norm(), 1e-15);
}

TEST(BankPredict, SingleComponentReducesToKalmanPrediction) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = scalar_noise({1}, {0}, {0.5}, {1}, {0}, {1});
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << 1.0, 2.0;
  prior.cov = Eigen::Matrix2d{{0.5, 0.1}, {0.1, 0.3}};
  const auto preds = bank_predict(model, prior);
  ASSERT_EQ(preds.size(), 1u);
  const Vector want_mean = sys.F * Vector{{1.0, 2.0}};
  EXPECT_LT((Vector(preds[0].mean) - want_mean).norm(), 1e-14);
}

TEST(BankPredict, LiftedProcessKeepsPredictionIncrementSingular) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = model2_noise(1.0);
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean.setZero();
  prior.cov = Eigen::Matrix2d{{0.4, 0.05}, {0.05, 0.2}};
  const auto preds = bank_predict(model, prior);
  const Eigen::Matrix2d fpf = sys.F * prior.cov * sys.F.transpose();
  for (const auto& p : preds)
    EXPECT_NEAR((p.cov - fpf).determinant(), 0.0, 1e-12);
}

TEST(BankInnovations, ExactMeasurementGivesZeroInnovationAndTopLikelihood) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = model2_noise(0.3);
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << 0.5, -0.1;
  prior.cov = 0.2 * Eigen::Matrix2d::Identity();

  const int i_star = 3, j_star = 1;
  const auto preds = bank_predict(model, prior);
  const double z_exact =
      (model.H * preds[i_star].mean)(0) + model.meas_means[j_star](0);

  const auto step = bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{z_exact}});
  const int h_star = step.index(i_star, j_star);
  EXPECT_NEAR(step.innovations[h_star](0), 0.0, 1e-12);
  // all hypotheses share S here (equal variances), so zero innovation tops
  for (int h = 0; h < 25; ++h) EXPECT_LE(step.logliks[h], step.logliks[h_star] + 1e-12);
}

TEST(BankInnovations, SingleHypothesisMatchesKalmanInnovation) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = scalar_noise({1}, {0.4}, {0.5}, {1}, {-0.2}, {0.8});
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << 1.0, 0.5;
  prior.cov = 0.3 * Eigen::Matrix2d::Identity();
  const auto step = bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{2.0}});

  const Vector xp = sys.F * Vector{{1.0, 0.5}} + Vector(model.process_means[0]);
  const double want_nu = 2.0 - (sys.H * xp)(0) - (-0.2);
  EXPECT_NEAR(step.innovations[0](0), want_nu, 1e-13);
}

TEST(BankInnovations, LikelihoodsMatchDirectDensityEvaluation) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = model2_noise(0.7);
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << -0.5, 0.2;
  prior.cov = Eigen::Matrix2d{{0.6, -0.1}, {-0.1, 0.4}};
  const auto step = bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{1.2}});

  for (int h = 0; h < 25; ++h) {
    const double direct =
        gaussian_logpdf(Vector{{step.innovations[h](0)}}, Vector::Zero(1),
                        Matrix{{step.innovation_covs[h](0, 0)}});
    EXPECT_NEAR(step.logliks[h], direct, 1e-12);
  }
}

TEST(ModeProbabilities, EqualPriorsAndLikelihoodsAreUniform) {
  const auto mu = update_mode_probabilities({0.5, 0.5}, {0.5, 0.5}, {-1.0, -1.0, -1.0, -1.0});
  for (double m : mu) EXPECT_NEAR(m, 0.25, 1e-15);
}

TEST(ModeProbabilities, ZeroLikelihoodGivesZeroWeight) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const auto mu = update_mode_probabilities({0.5, 0.5}, {1.0}, {ninf, -0.5});
  EXPECT_DOUBLE_EQ(mu[0], 0.0);
  EXPECT_NEAR(mu[1], 1.0, 1e-15);
}

TEST(ModeProbabilities, MatchesDirectFormulaOnRandomInstances) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pw = {0.3, 0.7};
    std::vector<double> mw = {0.1, 0.5, 0.4};
    std::vector<double> ll(6);
    for (auto& v : ll) v = -3.0 + 2.0 * rng.normal();
    const auto mu = update_mode_probabilities(pw, mw, ll);

    double denom = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) denom += pw[i] * mw[j] * std::exp(ll[i * 3 + j]);
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double direct = pw[i] * mw[j] * std::exp(ll[i * 3 + j]) / denom;
        EXPECT_NEAR(mu[i * 3 + j], direct, 1e-12);
        total += mu[i * 3 + j];
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(ModeProbabilities, AllImpossibleIsAnError) {
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(update_mode_probabilities({1.0}, {1.0}, {ninf}), NumericError);
}

TEST(GsfUpdate, SingleHypothesisEqualsKalmanStep) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = scalar_noise({1}, {0.2}, {0.7}, {1}, {0.1}, {0.9});
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << 0.3, -0.4;
  prior.cov = Eigen::Matrix2d{{0.5, 0.1}, {0.1, 0.6}};
  const auto step = bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{0.9}});
  const auto bank = gsf_update(model, step);
  ASSERT_EQ(bank.size(), 1u);

  const GaussianEstimate dyn_prior{Vector{{0.3, -0.4}}, Matrix(prior.cov)};
  const auto lifted = lifted_process(noise, sys.dt);
  const auto want = kalman_step(sys, dyn_prior, lifted.component(0),
                                noise.measurement.component(0), Vector{{0.9}});
  EXPECT_LT((Vector(bank[0].post_mean) - want.mean).norm(), 1e-12);
  EXPECT_LT((Matrix(bank[0].post_cov) - want.cov).norm(), 1e-12);
}

TEST(GsfUpdate, ZeroInnovationKeepsPredictedMean) {
  const LinearSystem sys = position_velocity_system();
  const auto noise = model2_noise(0.2);
  const auto model = make_bank_model<2, 1>(sys, noise);
  GaussianEstimateT<2> prior;
  prior.mean << 0.1, 0.0;
  prior.cov = 0.4 * Eigen::Matrix2d::Identity();
  const auto preds = bank_predict(model, prior);
  const double z = (model.H * preds[2].mean)(0) + model.meas_means[2](0);
  const auto step = bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{z}});
  const auto hyp = gsf_update_one(model, step, step.index(2, 2));
  EXPECT_LT((hyp.post_mean - preds[2].mean).norm(), 1e-12);
}

TEST(GsfUpdate, PosteriorCovariancePsdAndContracting) {
  const LinearSystem sys = position_velocity_system();
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto noise = model2_noise(0.05 + 0.4 * rng.uniform());
    const auto model = make_bank_model<2, 1>(sys, noise);
    GaussianEstimateT<2> prior;
    prior.mean << rng.normal(), rng.normal();
    Eigen::Matrix2d a;
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    prior.cov = a * a.transpose() + 0.2 * Eigen::Matrix2d::Identity();
    const auto step =
        bank_stage1(model, prior, Eigen::Matrix<double, 1, 1>{{3.0 * rng.normal()}});
    const auto bank = gsf_update(model, step);
    for (const auto& hyp : bank) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hyp.post_cov);
      EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
      EXPECT_LE(hyp.post_cov.trace(), hyp.pred_cov.trace() + 1e-12);
    }
  }
}
