#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sphreg/chain.hpp"
#include "sphreg/metrics.hpp"

namespace {

using namespace sphreg;

PosteriorDraws beta_draws(const Eigen::MatrixXd& beta, Eigen::VectorXd mu = {}) {
  PosteriorDraws d;
  d.beta = beta;
  d.mu = mu.size() ? mu : Eigen::VectorXd::Zero(beta.rows());
  return d;
}

TEST(PosteriorMse, HandValues) {
  EXPECT_EQ(posterior_mse(beta_draws(Eigen::MatrixXd::Constant(5, 2, 1.5)), Eigen::Vector2d(1.5, 1.5)),
            Eigen::Vector2d::Zero());
  Eigen::MatrixXd two(2, 1);
  two << 0.0, 2.0;
  EXPECT_DOUBLE_EQ(posterior_mse(beta_draws(two), Eigen::VectorXd::Ones(1))(0), 1.0);
  EXPECT_THROW(posterior_mse(beta_draws(two), Eigen::Vector2d::Ones()), std::invalid_argument);
}

TEST(PosteriorMse, VarianceWhenCentered) {
  RngStream g(71, 0);
  Eigen::MatrixXd b(100000, 1);
  for (Eigen::Index k = 0; k < b.rows(); ++k) b(k, 0) = 3.0 + 0.5 * g.normal();
  EXPECT_NEAR(posterior_mse(beta_draws(b), Eigen::VectorXd::Constant(1, 3.0))(0), 0.25, 0.005);
}

TEST(PosteriorMse, AtLeastSquaredBiasOfMean) {
  RngStream g(72, 0);
  Eigen::MatrixXd b(50, 4);
  for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = g.normal();
  const Eigen::Vector4d truth(0.3, -1.0, 2.0, 0.0);
  const Eigen::VectorXd m = posterior_mse(beta_draws(b), truth);
  const Eigen::VectorXd bias2 = (b.colwise().mean().transpose() - truth).array().square();
  for (int j = 0; j < 4; ++j) EXPECT_GE(m(j), bias2(j));
}

TEST(PredictionMse, HandValues) {
  Eigen::MatrixXd b(2, 1);
  b << 0.0, 2.0;
  Dataset test;
  test.X = Eigen::MatrixXd::Ones(2, 1);
  test.y = Eigen::Vector2d(1.0, 3.0);
  const Eigen::VectorXd m = prediction_mse(beta_draws(b, Eigen::Vector2d(0.0, 0.0)), test);
  EXPECT_DOUBLE_EQ(m(0), 1.0);
  EXPECT_DOUBLE_EQ(m(1), 5.0);
  // the intercept draws enter the fit
  const Eigen::VectorXd shifted = prediction_mse(beta_draws(b, Eigen::Vector2d(1.0, 1.0)), test);
  EXPECT_DOUBLE_EQ(shifted(0), 2.0);
  test.X = Eigen::MatrixXd::Ones(2, 2);
  EXPECT_THROW(prediction_mse(beta_draws(b), test), std::invalid_argument);
}

TEST(CredibleInterval, PinnedQuantileRule) {
  Eigen::MatrixXd b(100, 1);
  for (int k = 0; k < 100; ++k) b(k, 0) = 100 - k;
  const IntervalEstimate ci = credible_interval(beta_draws(b), 0, 0.9);
  EXPECT_NEAR(ci.lower, 5.95, 1e-12);
  EXPECT_NEAR(ci.upper, 95.05, 1e-12);
  const IntervalEstimate full = credible_interval(beta_draws(b), 0, 1.0);
  EXPECT_EQ(full.lower, 1.0);
  EXPECT_EQ(full.upper, 100.0);
  EXPECT_THROW(credible_interval(beta_draws(b), 0, 0.0), std::invalid_argument);
}

TEST(CredibleInterval, SymmetricDraws) {
  RngStream g(73, 0);
  Eigen::MatrixXd b(100000, 1);
  for (Eigen::Index k = 0; k < b.rows(); ++k) b(k, 0) = g.normal();
  const IntervalEstimate ci = credible_interval(beta_draws(b), 0, 0.9);
  EXPECT_NEAR(ci.lower + ci.upper, 0.0, 0.03);
  EXPECT_NEAR(ci.upper, 1.6448536, 0.02);
}

TEST(Sandwich, OneDimensionalHandValue) {
  const Eigen::MatrixXd v = sandwich_matrix(Eigen::MatrixXd::Constant(1, 1, 4.0), Eigen::MatrixXd::Constant(1, 1, 9.0), 1.0);
  EXPECT_DOUBLE_EQ(v(0, 0), 144.0);
  EXPECT_DOUBLE_EQ(sandwich_matrix(Eigen::MatrixXd::Constant(1, 1, 4.0), Eigen::MatrixXd::Constant(1, 1, 9.0), 0.5)(0, 0),
                   288.0);
  EXPECT_THROW(sandwich_matrix(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1), 0.0),
               std::invalid_argument);
  EXPECT_THROW(sandwich_matrix(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), 1.0),
               std::runtime_error);
}

TEST(Sandwich, ZeroVarianceIsDegenerateAtMean) {
  PosteriorDraws d = beta_draws(Eigen::MatrixXd::Constant(10, 1, 0.7));
  Dataset data;
  data.X = Eigen::MatrixXd::Ones(5, 1);
  data.y = Eigen::VectorXd::Zero(5);
  d.has_intercept = false;
  const IntervalEstimate ci = sandwich_interval(d, data, 1.0, 0, 0.9);
  EXPECT_DOUBLE_EQ(ci.lower, 0.7);
  EXPECT_DOUBLE_EQ(ci.upper, 0.7);
  EXPECT_EQ(ci.method, IntervalMethod::SandwichNormal);
}

TEST(Sandwich, ConjugateGaussianFitIsUnchanged) {
  RngStream g(74, 0);
  Dataset d;
  d.X.resize(300, 2);
  d.y.resize(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    d.X(i, 0) = g.normal();
    d.X(i, 1) = g.normal();
    d.y(i) = 0.5 + d.X(i, 0) - 2.0 * d.X(i, 1) + 1.5 * g.normal();
  }
  ModelSpec spec = with_loss(ModelSpec{}, LossKind::L2);
  spec.ridge.prior_precision = 1e-8;
  McmcConfig cfg;
  cfg.n_burnin = 500;
  cfg.n_draws = 10000;
  cfg.record_lambda = false;
  RngStream r(74, 1);
  const PosteriorDraws draws = run_chain(d, spec, cfg, r);
  // V_n with sigma^2 at its posterior mean reproduces the posterior covariance
  const double s2 = draws.sigma2.mean();
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double adj = sandwich_interval(draws, d, s2, j, 0.9).length();
    const double raw = credible_interval(draws, j, 0.9).length();
    EXPECT_NEAR(adj / raw, 1.0, 0.05) << j;
  }
}

TEST(DesignCrossprod, CentersWithIntercept) {
  Dataset d;
  d.X = (Eigen::MatrixXd(3, 1) << 1.0, 2.0, 6.0).finished();
  EXPECT_DOUBLE_EQ(design_crossprod(d, false)(0, 0), 41.0);
  EXPECT_DOUBLE_EQ(design_crossprod(d, true)(0, 0), 14.0);
}

IntervalEstimate iv(double lo, double hi) { return {lo, hi, 0.9, IntervalMethod::EquiTailed}; }

TEST(CoverageAndLength, Counts) {
  const Eigen::VectorXd truth = Eigen::Vector2d(0.0, 5.0);
  std::vector<std::vector<IntervalEstimate>> reps = {
      {iv(-1, 1), iv(0, 1)}, {iv(-2, 1), iv(0, 1)}, {iv(-1, 3), iv(4, 6)}, {iv(1, 2), iv(0, 1)}};
  const auto [cover, len] = coverage_and_length(reps, truth);
  EXPECT_DOUBLE_EQ(cover(0), 0.75);
  EXPECT_DOUBLE_EQ(cover(1), 0.25);
  EXPECT_DOUBLE_EQ(len(0), (2.0 + 3.0 + 4.0 + 1.0) / 4.0);
  EXPECT_DOUBLE_EQ(len(1), (1.0 + 1.0 + 2.0 + 1.0) / 4.0);
  const auto all_in = coverage_and_length({{iv(-1, 1)}, {iv(-1, 1)}}, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(all_in.first(0), 1.0);
  const auto all_out = coverage_and_length({{iv(1, 2)}, {iv(1, 2)}}, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(all_out.first(0), 0.0);
  EXPECT_THROW(coverage_and_length({{iv(0, 1)}}, truth), std::invalid_argument);
}

TEST(Mcc, KnownValues) {
  const Eigen::VectorXi a = (Eigen::VectorXi(6) << 1, 0, 1, 1, 0, 0).finished();
  EXPECT_DOUBLE_EQ(mcc(a, a), 1.0);
  const Eigen::VectorXi comp = Eigen::VectorXi::Ones(6) - a;
  EXPECT_DOUBLE_EQ(mcc(comp, a), -1.0);
  EXPECT_EQ(mcc(Eigen::VectorXi::Zero(6), a), 0.0);
  EXPECT_THROW(mcc(a, Eigen::VectorXi::Zero(5)), std::invalid_argument);
}

TEST(Mcc, ConfusionTable) {
  // TP = 4, TN = 90, FP = 5, FN = 1
  Eigen::VectorXi hat = Eigen::VectorXi::Zero(100), truth = Eigen::VectorXi::Zero(100);
  truth.head(5).setOnes();
  hat.head(4).setOnes();
  hat.segment(5, 5).setOnes();
  const double want = (4.0 * 90.0 - 5.0 * 1.0) / std::sqrt(9.0 * 5.0 * 95.0 * 91.0);
  EXPECT_NEAR(mcc(hat, truth), want, 1e-15);
  const Eigen::VectorXi flip_hat = Eigen::VectorXi::Ones(100) - hat;
  const Eigen::VectorXi flip_truth = Eigen::VectorXi::Ones(100) - truth;
  EXPECT_NEAR(mcc(flip_hat, flip_truth), mcc(hat, truth), 1e-15);
}

TEST(MedianProbabilityModel, ThresholdsAtHalf) {
  PosteriorDraws d;
  d.prior = PriorKind::SpikeSlab;
  d.beta = Eigen::MatrixXd::Zero(4, 3);
  d.gamma.resize(4, 3);
  d.gamma << 1, 1, 0,
             1, 0, 0,
             1, 1, 1,
             0, 0, 0;
  EXPECT_EQ(median_probability_model(d), Eigen::Vector3i(1, 0, 0));
}

TEST(MedianOfMedians, ReplicatesThenCoordinates) {
  Eigen::MatrixXd v(3, 3);
  v << 1, 10, 100,
       2, 20, 200,
       9, 30, 300;
  EXPECT_DOUBLE_EQ(median_of_medians(v), 20.0);
  Eigen::MatrixXd even(4, 2);
  even << 1, 5,
          2, 6,
          3, 7,
          4, 8;
  EXPECT_DOUBLE_EQ(median_of_medians(even), 4.5);
  EXPECT_THROW(median_of_medians(Eigen::MatrixXd(0, 0)), std::invalid_argument);
}

}  // namespace
