#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "sphreg/chain.hpp"
#include "sphreg/sampler_core.hpp"
#include "sphreg/slice.hpp"
#include "sphreg/synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace sphreg;
using sphreg::testing::ks_distance_cdf;
using sphreg::testing::mean;
using sphreg::testing::sd;

const double kInf = std::numeric_limits<double>::infinity();

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Dataset small_data(int n, int p, std::uint64_t stream) {
  RngStream r(11, stream);
  Dataset d;
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = r.normal();
  }
  d.y = d.X * Eigen::VectorXd::LinSpaced(p, 1.0, 2.0);
  for (int i = 0; i < n; ++i) d.y(i) += 0.5 + r.normal();
  return d;
}

// ------------------------------------------------------------------ slice

TEST(SliceSampleStep, StandardNormalInvariant) {
  RngStream r(1, 0);
  auto logf = [](double x) { return -0.5 * x * x; };
  std::vector<double> x(100000);
  double cur = 0.0;
  for (double& v : x) v = cur = slice_sample_step(logf, cur, 1.0, 50, Interval{}, r);
  EXPECT_LT(ks_distance_cdf(x, phi), 0.01);
}

TEST(SliceSampleStep, ShrinkageOnlyInvariant) {
  RngStream r(2, 0);
  auto logf = [](double x) { return -0.5 * x * x; };
  std::vector<double> x(100000);
  double cur = 0.0;
  for (double& v : x) v = cur = slice_sample_step(logf, cur, 20.0, 0, Interval{}, r);
  EXPECT_LT(ks_distance_cdf(x, phi), 0.01);
}

TEST(SliceSampleStep, RespectsDomain) {
  RngStream r(3, 0);
  auto flat = [](double) { return 0.0; };
  double cur = 0.5;
  std::vector<double> x(20000);
  for (double& v : x) {
    v = cur = slice_sample_step(flat, cur, 3.0, 10, Interval{0.0, 1.0}, r);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  EXPECT_LT(ks_distance_cdf(x, [](double u) { return u; }), 0.02);
}

TEST(SliceSampleStep, Errors) {
  RngStream r(4, 0);
  auto logf = [](double x) { return x > 0.0 ? -x : -kInf; };
  EXPECT_THROW(slice_sample_step(logf, -1.0, 1.0, 5, Interval{}, r), SamplerError);
  EXPECT_THROW(slice_sample_step(logf, 2.0, 1.0, 5, Interval{0.0, 1.0}, r), SamplerError);
}

// ------------------------------------------------------- alpha^2 conditional

TEST(Alpha2Conditional, EmptyDataIsPrior) {
  const Alpha2Prior prior{true, 1.0, 1.0};
  const Eigen::VectorXd none(0);
  EXPECT_NEAR(log_alpha2_conditional(2.0, none, prior) - log_alpha2_conditional(0.5, none, prior), -1.5, 1e-14);
  RngStream r(5, 0);
  auto target = [&](double a2) { return log_alpha2_conditional(a2, none, prior); };
  std::vector<double> x(10000);
  double cur = 1.0;
  for (double& v : x) v = cur = slice_sample_step(target, cur, 1.0, 50, Interval{0.0, kInf}, r);
  EXPECT_LT(ks_distance_cdf(x, [](double v) { return 1.0 - std::exp(-v); }), 0.02);
}

TEST(Alpha2Conditional, FiniteAtLargeAlpha) {
  const Eigen::VectorXd e = Eigen::VectorXd::Ones(1000);
  const double v = log_alpha2_conditional(1e7, e);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(log_alpha2_conditional(0.0, e), -kInf);
  EXPECT_EQ(log_alpha2_conditional(-1.0, e), -kInf);
}

TEST(Alpha2Conditional, ZeroResidualsMatchDirectFormula) {
  const int n = 30;
  const Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  auto direct = [&](double a2) {
    const double a = std::sqrt(a2);
    const double c = std::sqrt(1.0 + a2);
    return -0.5 * n * std::log(a2) - n * std::log(boost::math::cyl_bessel_k(1.0, c * a)) - c * n * a;
  };
  const double got = log_alpha2_conditional(3.0, e) - log_alpha2_conditional(0.4, e);
  const double want = direct(3.0) - direct(0.4);
  EXPECT_NEAR(got / want, 1.0, 1e-10);
}

TEST(Alpha2Conditional, EqualsSumOfErrorLogDensities) {
  RngStream r(6, 0);
  Eigen::VectorXd e(200);
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = sample_student_t(4.0, r);
  auto sum_logf = [&](double a2) {
    const SphDensity d = make_sph_density(std::sqrt(a2));
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) s += log_density(d, e(i));
    return s;
  };
  const double base = log_alpha2_conditional(1.0, e) - sum_logf(1.0);
  for (double a2 : {1e-8, 1e-3, 0.3, 4.0, 50.0}) {
    EXPECT_NEAR(log_alpha2_conditional(a2, e) - sum_logf(a2), base, 1e-8) << a2;
  }
}

// ------------------------------------------------------------ Gibbs blocks

TEST(GibbsRidge, PriorRecoveryWithoutData) {
  Dataset d;
  d.X.resize(0, 2);
  d.y.resize(0);
  RidgeSpec spec;
  spec.beta0 = Eigen::Vector2d(1.0, -2.0);
  spec.Q = Eigen::Matrix2d{{4.0, 1.0}, {1.0, 2.0}};
  spec.alpha_prior = true;
  spec.a_alpha = spec.b_alpha = 1.0;
  ChainState s = initialize_ridge(d, spec);
  McmcConfig cfg;
  RngStream r(7, 0);
  const int m = 10000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sxx = Eigen::Matrix2d::Zero();
  for (int k = 0; k < m; ++k) {
    gibbs_step_ridge(s, d, spec, cfg, r);
    sum += s.beta;
    sxx += (s.beta - spec.beta0) * (s.beta - spec.beta0).transpose();
  }
  const Eigen::Matrix2d cov = spec.Q.inverse();
  const Eigen::Vector2d mbar = sum / m;
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(mbar(j), spec.beta0(j), 3.0 * std::sqrt(cov(j, j) / m));
  EXPECT_LT(((sxx / m) - cov).cwiseAbs().maxCoeff(), 0.03);
}

TEST(GibbsRidge, LambdaGivenZeroResidual) {
  Dataset d;
  d.X = Eigen::MatrixXd::Zero(1, 1);
  d.y = Eigen::VectorXd::Zero(1);
  RidgeSpec spec;
  ChainState s = initialize_ridge(d, spec);
  s.alpha2 = 2.0;
  McmcConfig cfg;
  RngStream r(8, 0);
  std::vector<double> lam(100000);
  for (double& v : lam) {
    update_lambda(s, d, spec, cfg, r);
    v = s.lambda(0);
  }
  // GIG(1 + alpha^2, alpha^2, 1/2)
  const double a = 3.0, b = 2.0, w = std::sqrt(a * b);
  const double expected = std::sqrt(b / a) * boost::math::cyl_bessel_k(1.5, w) / boost::math::cyl_bessel_k(0.5, w);
  EXPECT_NEAR(mean(lam), expected, 3.0 * sd(lam) / std::sqrt(lam.size()));
}

TEST(GibbsL1, ZeroResidualLambdaIsGammaHalf) {
  Dataset d;
  d.X = Eigen::MatrixXd::Ones(1, 1);
  d.y = Eigen::VectorXd::Constant(1, 2.0);
  RidgeSpec spec;
  spec.loss = LossKind::L1;
  ChainState s = initialize_ridge(d, spec);
  s.mu = 0.0;
  s.beta(0) = 2.0;
  McmcConfig cfg;
  RngStream r(9, 0);
  std::vector<double> lam(100000);
  for (double& v : lam) {
    update_lambda(s, d, spec, cfg, r);
    v = s.lambda(0);
  }
  // GIG(2, 0, 1/2) = Gamma(1/2, rate 1)
  const boost::math::gamma_distribution<double> g(0.5, 1.0);
  EXPECT_NEAR(mean(lam), 0.5, 3.0 * sd(lam) / std::sqrt(lam.size()));
  EXPECT_LT(ks_distance_cdf(lam, [&](double x) { return boost::math::cdf(g, x); }), 0.01);
}

TEST(GibbsVariants, AlphaUntouchedByL1AndL2) {
  const Dataset d = small_data(40, 3, 1);
  RidgeSpec spec;
  McmcConfig cfg;
  RngStream r(10, 0);
  ChainState s = initialize_ridge(d, spec);
  s.alpha2 = 0.37;
  for (int k = 0; k < 50; ++k) {
    gibbs_step_l1(s, d, spec, cfg, r);
    gibbs_step_l2(s, d, spec, cfg, r);
  }
  EXPECT_EQ(s.alpha2, 0.37);
}

TEST(GibbsL2, ConjugatePosteriorMean) {
  const Dataset d = small_data(50, 2, 2);
  ModelSpec spec;
  spec.ridge.loss = LossKind::L2;
  spec.ridge.prior_precision = 0.5;
  spec.ridge.tau_mu2 = 4.0;
  spec.ridge.a_sigma = 2.0;
  spec.ridge.b_sigma = 1.5;
  McmcConfig cfg;
  cfg.n_burnin = 500;
  cfg.n_draws = 10000;
  RngStream r(12, 0);
  const PosteriorDraws draws = run_chain(d, spec, cfg, r);

  // theta = (mu, beta) has prior N(0, sigma^2 diag(tau_mu2, 1/0.5, 1/0.5))
  Eigen::MatrixXd Z(d.n(), 3);
  Z.col(0).setOnes();
  Z.rightCols(2) = d.X;
  Eigen::Matrix3d prec0 = Eigen::Vector3d(1.0 / 4.0, 0.5, 0.5).asDiagonal();
  const Eigen::Vector3d post_mean = (Z.transpose() * Z + prec0).ldlt().solve(Z.transpose() * d.y);
  EXPECT_NEAR(draws.mu.mean(), post_mean(0), 3.0 * sphreg::testing::batch_means_se(draws.mu));
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(draws.beta.col(j).mean(), post_mean(j + 1), 3.0 * sphreg::testing::batch_means_se(draws.beta.col(j)));
  }
}

TEST(GibbsRidge, RecoversCoefficientsUnderNormalErrors) {
  SimSetting s;
  s.n = 500;
  s.p = 10;
  RngStream data_rng(13, 0);
  const SimulatedData sim = generate_dataset(s, data_rng);
  ModelSpec spec;
  McmcConfig cfg;
  cfg.n_burnin = 1000;
  cfg.n_draws = 2000;
  cfg.record_lambda = false;
  RngStream r(13, 1);
  const PosteriorDraws draws = run_chain(sim.data, spec, cfg, r);
  EXPECT_LT((draws.beta_mean() - sim.beta_true).cwiseAbs().maxCoeff(), 0.15);
}

// ---------------------------------------------------------------- run_chain

TEST(RunChain, KeepsRequestedDraws) {
  const Dataset d = small_data(20, 2, 3);
  McmcConfig cfg;
  cfg.n_burnin = 0;
  cfg.n_draws = 3;
  RngStream r(14, 0);
  const PosteriorDraws draws = run_chain(d, ModelSpec{}, cfg, r);
  EXPECT_EQ(draws.n_draws(), 3);
  EXPECT_EQ(draws.lambda.rows(), 3);
  EXPECT_EQ(draws.lambda.cols(), 20);
  EXPECT_EQ(draws.mu.size(), 3);
}

TEST(RunChain, BitIdenticalUnderSameSeed) {
  const Dataset d = small_data(60, 4, 4);
  McmcConfig cfg;
  cfg.n_burnin = 100;
  cfg.n_draws = 200;
  for (LossKind k : {LossKind::SPH, LossKind::UnscaledPH, LossKind::L1, LossKind::L2}) {
    const ModelSpec spec = with_loss(ModelSpec{}, k);
    RngStream a(15, 2), b(15, 2);
    const PosteriorDraws x = run_chain(d, spec, cfg, a);
    const PosteriorDraws y = run_chain(d, spec, cfg, b);
    EXPECT_TRUE(x.beta == y.beta) << to_string(k);
    EXPECT_TRUE(x.alpha2 == y.alpha2);
    EXPECT_TRUE(x.lambda == y.lambda);
    EXPECT_TRUE(x.mu == y.mu);
  }
}

TEST(RunChain, SigmaBlockUpdatesWhenIncluded) {
  const Dataset d = small_data(60, 2, 5);
  ModelSpec spec;
  spec.ridge.include_sigma = true;
  McmcConfig cfg;
  cfg.n_burnin = 10;
  cfg.n_draws = 50;
  RngStream r(16, 0);
  const PosteriorDraws draws = run_chain(d, spec, cfg, r);
  EXPECT_TRUE(draws.has_sigma);
  EXPECT_GT(draws.sigma2.maxCoeff() - draws.sigma2.minCoeff(), 0.0);
}

TEST(RunChain, RejectsInvalidInputs) {
  Dataset d = small_data(10, 2, 6);
  McmcConfig cfg;
  RngStream r(17, 0);
  cfg.n_draws = 0;
  EXPECT_THROW(run_chain(d, ModelSpec{}, cfg, r), std::invalid_argument);
  cfg.n_draws = 5;
  ModelSpec huber;
  huber.ridge.loss = LossKind::Huber;
  EXPECT_THROW(run_chain(d, huber, cfg, r), std::invalid_argument);
  d.y.conservativeResize(9);
  EXPECT_THROW(run_chain(d, ModelSpec{}, cfg, r), std::invalid_argument);
}

}  // namespace
