#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "sphreg/synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace sphreg;
using sphreg::testing::ks_distance_cdf;

constexpr Eigen::Index kN = 100000;

double lag1(const Eigen::VectorXd& x) {
  const double m = x.mean();
  const Eigen::ArrayXd c = x.array() - m;
  return (c.head(x.size() - 1) * c.tail(x.size() - 1)).sum() / c.square().sum();
}

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  return (ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum());
}

std::vector<double> as_vector(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

TEST(BetaTrue, DenseAndSparsePatterns) {
  SimSetting s;
  s.p = 10;
  const Eigen::VectorXd dense = beta_true(s);
  EXPECT_DOUBLE_EQ(dense(0), 0.5);
  EXPECT_DOUBLE_EQ(dense(9), 2.5);
  for (int j = 1; j < 10; ++j) EXPECT_NEAR(dense(j) - dense(j - 1), 2.0 / 9.0, 1e-15);
  s.p = 2;
  EXPECT_TRUE(beta_true(s) == Eigen::Vector2d(0.5, 2.5));
  s.p = 100;
  s.beta_pattern = BetaPattern::Sparse;
  const Eigen::VectorXd sparse = beta_true(s);
  EXPECT_EQ((sparse.array() == 2.0).count(), 5);
  EXPECT_EQ((sparse.array() == 0.0).count(), 95);
  EXPECT_TRUE((sparse.head(5).array() == 2.0).all());
  s.p = 21;
  EXPECT_EQ((beta_true(s).array() == 2.0).count(), 2);
}

TEST(GenerateErrors, IidNormalMoments) {
  RngStream g(51, 0);
  const Eigen::VectorXd e = generate_errors(kN, 0.0, ErrorDist::normal(), g).values;
  const double m = e.mean();
  const Eigen::ArrayXd c = e.array() - m;
  const double m2 = c.square().mean();
  const double skew = c.cube().mean() / std::pow(m2, 1.5);
  const double kurt = c.square().square().mean() / (m2 * m2) - 3.0;
  EXPECT_NEAR(skew, 0.0, 3.0 * std::sqrt(6.0 / kN));
  EXPECT_NEAR(kurt, 0.0, 3.0 * std::sqrt(24.0 / kN));
}

TEST(GenerateErrors, Ar1Autocorrelation) {
  RngStream g(52, 0);
  const Eigen::VectorXd e = generate_errors(kN, 0.4, ErrorDist::normal(), g).values;
  EXPECT_NEAR(lag1(e), 0.4, 3.0 * (1.0 - 0.16) / std::sqrt(double(kN)));
  EXPECT_NEAR(e.squaredNorm() / kN, 1.0, 0.02);
}

TEST(GenerateErrors, WideUniformContaminationFraction) {
  RngStream g(53, 0);
  const ErrorSample e = generate_errors(kN, 0.0, ErrorDist::mix_uniform(0.9, 1e10), g);
  const double frac = (e.values.array().abs() > 3.0).cast<double>().mean();
  // contaminant mass beyond 3 is ~1, the normal component adds 0.9 * P(|Z| > 3)
  const double expected = 0.1 + 0.9 * std::erfc(3.0 / std::sqrt(2.0));
  EXPECT_NEAR(frac, expected, 3.0 * std::sqrt(expected * (1.0 - expected) / kN));
  EXPECT_NEAR(e.contaminated.cast<double>().mean(), 0.1, 3.0 * std::sqrt(0.09 / kN));
}

TEST(GenerateErrors, MarginalFidelityForEveryKind) {
  const std::vector<ErrorDist> kinds = {ErrorDist::normal(), ErrorDist::student_t(1.0), ErrorDist::student_t(4.0),
                                        ErrorDist::mix_cauchy(0.9, 10.0), ErrorDist::mix_wide_normal(0.8, 5.0),
                                        ErrorDist::mix_uniform(0.9, 20.0)};
  std::uint64_t stream = 0;
  for (const ErrorDist& e : kinds) {
    for (double rho : {0.0, 0.5}) {
      RngStream g(54, stream++);
      const Eigen::VectorXd v = generate_errors(kN, rho, e, g).values;
      // KS bounds assume independence; the serially correlated paths get more room
      const double bound = rho == 0.0 ? 0.01 : 0.02;
      EXPECT_LT(ks_distance_cdf(as_vector(v), [&](double x) { return error_cdf(e, x); }), bound)
          << static_cast<int>(e.kind) << " rho " << rho;
    }
  }
}

TEST(GenerateErrors, StudentCdfMatchesBoost) {
  const boost::math::students_t_distribution<double> t(3.0);
  for (double x : {-5.0, -0.3, 0.0, 2.0}) EXPECT_NEAR(error_cdf(ErrorDist::student_t(3.0), x), boost::math::cdf(t, x), 1e-14);
  EXPECT_NEAR(error_cdf(ErrorDist::mix_cauchy(0.9, 5.0), 5.0), 0.9 * 0.5 * std::erfc(-5.0 / std::sqrt(2.0)) + 0.1 * 0.75, 1e-14);
}

TEST(GenerateErrors, LatentDriverIsAr1) {
  for (const ErrorDist& e : {ErrorDist::student_t(2.0), ErrorDist::mix_cauchy(0.9, 5.0)}) {
    RngStream g(55, static_cast<std::uint64_t>(e.kind));
    const ErrorSample s = generate_errors(kN, 0.6, e, g);
    EXPECT_NEAR(lag1(s.latent), 0.6, 3.0 * (1.0 - 0.36) / std::sqrt(double(kN)));
  }
}

TEST(GenerateErrors, StudentCopulaPreservesRankDependence) {
  RngStream g(56, 0);
  const ErrorSample s = generate_errors(kN, 0.6, ErrorDist::student_t(3.0), g);
  for (Eigen::Index i = 1; i < 1000; ++i) {
    ASSERT_EQ(s.values(i) > s.values(i - 1), s.latent(i) > s.latent(i - 1));
  }
}

TEST(GenerateErrors, RejectsInvalidDistributions) {
  RngStream g(57, 0);
  EXPECT_THROW(generate_errors(10, 0.0, ErrorDist::mix_cauchy(1.5, 1.0), g), std::invalid_argument);
  EXPECT_THROW(generate_errors(10, 0.0, ErrorDist::student_t(0.5), g), std::invalid_argument);
}

TEST(GeneratePredictors, IidColumnsHaveUnitVariance) {
  SimSetting s;
  s.n = kN;
  s.p = 3;
  RngStream g(58, 0);
  const Eigen::MatrixXd X = generate_predictors(s, g);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double v = (X.col(j).array() - X.col(j).mean()).square().mean();
    EXPECT_NEAR(v, 1.0, 3.0 * std::sqrt(2.0 / kN));
  }
}

TEST(GeneratePredictors, SerialAndCrossCorrelation) {
  SimSetting s;
  s.n = kN;
  s.p = 2;
  s.rho_x = 0.4;
  RngStream g(59, 0);
  const Eigen::MatrixXd X = generate_predictors(s, g);
  // serial dependence inflates the SE of the contemporaneous correlation
  const double se_lag = (1.0 - 0.16) / std::sqrt(double(kN));
  const double se_cross = (1.0 - 0.16) * std::sqrt((1.0 + 0.16) / (1.0 - 0.16) / kN);
  EXPECT_NEAR(lag1(X.col(0)), 0.4, 3.0 * se_lag);
  EXPECT_NEAR(lag1(X.col(1)), 0.4, 3.0 * se_lag);
  EXPECT_NEAR(corr(X.col(0), X.col(1)), 0.4, 3.0 * se_cross);
}

TEST(GeneratePredictors, StationaryFromFirstRow) {
  SimSetting s;
  s.n = 50;
  s.p = 1;
  s.rho_x = 0.9;
  s.beta_pattern = BetaPattern::Sparse;
  const int reps = 20000;
  Eigen::VectorXd first(reps), last(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream g(60, static_cast<std::uint64_t>(r));
    const Eigen::MatrixXd X = generate_predictors(s, g);
    first(r) = X(0, 0);
    last(r) = X(49, 0);
  }
  const double se = std::sqrt(2.0 / reps);
  EXPECT_NEAR(first.squaredNorm() / reps, 1.0, 3.0 * se);
  EXPECT_NEAR(last.squaredNorm() / reps, 1.0, 3.0 * se);
}

TEST(GeneratePredictors, InfeasibleCorrelationRejected) {
  RngStream g(61, 0);
  EXPECT_THROW(generate_var1(10, equicorrelation(3, -0.9), 0.0, g), std::invalid_argument);
}

TEST(GenerateDataset, ComposesPiecesAndLabels) {
  SimSetting s;
  s.n = 200;
  s.p = 5;
  s.error = ErrorDist::mix_cauchy(0.9, 10.0);
  RngStream a(62, 0), b(62, 0);
  const SimulatedData d = generate_dataset(s, a);
  ASSERT_EQ(d.data.X.rows(), 200);
  ASSERT_EQ(d.data.X.cols(), 5);
  ASSERT_EQ(d.contaminated.size(), 200);
  EXPECT_EQ(d.data.names.front(), "x1");
  const Eigen::MatrixXd X = generate_predictors(s, b);
  const ErrorSample e = generate_errors(s, b);
  EXPECT_TRUE(d.data.X == X);
  EXPECT_TRUE(d.data.y == X * beta_true(s) + e.values);
  EXPECT_TRUE(d.contaminated == e.contaminated);
}

TEST(GenerateContaminationDesign, Structure) {
  RngStream g(63, 0);
  const SimulatedData d = generate_contamination_design(20000, 0.1, g);
  EXPECT_TRUE(d.beta_true == (Eigen::VectorXd(5) << 2, 2, 0, 0, 0).finished());
  EXPECT_NEAR(d.contaminated.cast<double>().mean(), 0.1, 3.0 * std::sqrt(0.09 / 20000));
  EXPECT_NEAR(corr(d.data.X.col(0), d.data.X.col(1)), 0.9, 0.01);
  EXPECT_NEAR(lag1(d.data.X.col(2)), 0.4, 0.03);
}

}  // namespace
