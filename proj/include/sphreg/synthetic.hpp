#pragma once

// Simulated regression data: serially correlated errors with a chosen marginal,
// VAR(1) Gaussian predictors, and the dense or sparse true coefficients.
//
// Error constructions for rho_eps > 0:
//   Normal          eps_i = rho eps_{i-1} + sqrt(1 - rho^2) z_i
//   Student t       Gaussian copula: latent AR(1) z_i mapped by F_t^{-1}(Phi(z_i))
//   two-component   component switching: iid labels pick either the latent
//   mixtures        normal AR(1) value or an iid contaminant draw
// All three leave the stated marginal exact; the mixture construction also
// makes the contamination labels meaningful.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "sphreg/distributions.hpp"
#include "sphreg/model.hpp"
#include "sphreg/rng.hpp"

namespace sphreg {

enum class ErrorKind { Normal, StudentT, MixNormalCauchy, MixNormalWideNormal, MixNormalUniform };

/// Error marginal. For mixtures, weight is the probability of the N(0,1) component
/// and scale is the Cauchy scale, the wide normal's sd, or the uniform half-width.
struct ErrorDist {
  ErrorKind kind = ErrorKind::Normal;
  double df = 4.0;
  double weight = 0.9;
  double scale = 1.0;

  static ErrorDist normal() { return {ErrorKind::Normal, 0, 1, 1}; }
  static ErrorDist student_t(double df) { return {ErrorKind::StudentT, df, 1, 1}; }
  static ErrorDist mix_cauchy(double weight, double scale) { return {ErrorKind::MixNormalCauchy, 0, weight, scale}; }
  static ErrorDist mix_wide_normal(double weight, double sd) {
    return {ErrorKind::MixNormalWideNormal, 0, weight, sd};
  }
  static ErrorDist mix_uniform(double weight, double half_width) {
    return {ErrorKind::MixNormalUniform, 0, weight, half_width};
  }

  bool is_mixture() const {
    return kind == ErrorKind::MixNormalCauchy || kind == ErrorKind::MixNormalWideNormal ||
           kind == ErrorKind::MixNormalUniform;
  }

  void validate() const {
    if (kind == ErrorKind::StudentT && !(df >= 1.0)) throw std::invalid_argument("student t needs df >= 1");
    if (is_mixture()) {
      if (!(weight > 0.0 && weight < 1.0)) throw std::invalid_argument("mixture weight must be in (0, 1)");
      if (!(scale > 0.0)) throw std::invalid_argument("mixture scale must be positive");
    }
  }
};

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// CDF of the contaminating component of a mixture.
inline double contaminant_cdf(const ErrorDist& e, double x) {
  switch (e.kind) {
    case ErrorKind::MixNormalCauchy: return 0.5 + std::atan(x / e.scale) / std::numbers::pi;
    case ErrorKind::MixNormalWideNormal: return standard_normal_cdf(x / e.scale);
    case ErrorKind::MixNormalUniform:
      if (x <= -e.scale) return 0.0;
      if (x >= e.scale) return 1.0;
      return (x + e.scale) / (2.0 * e.scale);
    default: throw std::invalid_argument("contaminant_cdf: not a mixture");
  }
}

inline double error_cdf(const ErrorDist& e, double x) {
  switch (e.kind) {
    case ErrorKind::Normal: return standard_normal_cdf(x);
    case ErrorKind::StudentT: return boost::math::cdf(boost::math::students_t_distribution<double>(e.df), x);
    default: return e.weight * standard_normal_cdf(x) + (1.0 - e.weight) * contaminant_cdf(e, x);
  }
}

inline double sample_contaminant(const ErrorDist& e, RngStream& rng) {
  switch (e.kind) {
    case ErrorKind::MixNormalCauchy: return sample_cauchy(0.0, e.scale, rng);
    case ErrorKind::MixNormalWideNormal: return e.scale * rng.normal();
    case ErrorKind::MixNormalUniform: return e.scale * (2.0 * rng.uniform() - 1.0);
    default: throw std::invalid_argument("sample_contaminant: not a mixture");
  }
}

enum class BetaPattern { Dense, Sparse };

struct SimSetting {
  std::string id = "setting";
  Eigen::Index n = 100;
  Eigen::Index p = 10;
  double rho_eps = 0.0;
  double rho_x = 0.0;        // serial correlation of each predictor
  double rho_x_cross = -1;   // contemporaneous equicorrelation; negative means "same as rho_x"
  ErrorDist error;
  BetaPattern beta_pattern = BetaPattern::Dense;
  int n_replicates = 20;
  std::uint64_t seed = 0;

  double cross_correlation() const { return rho_x_cross < 0.0 ? rho_x : rho_x_cross; }

  void validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("setting " + id + ": n and p must be positive");
    if (beta_pattern == BetaPattern::Dense && p < 2) throw std::invalid_argument("dense beta pattern needs p >= 2");
    if (!(rho_eps >= 0.0 && rho_eps < 1.0)) throw std::invalid_argument("rho_eps must be in [0, 1)");
    if (!(rho_x >= 0.0 && rho_x < 1.0)) throw std::invalid_argument("rho_x must be in [0, 1)");
    if (rho_x_cross >= 1.0) throw std::invalid_argument("rho_x_cross must be below 1");
    error.validate();
  }
};

/// Dense: 0.5 + (j-1) 2/(p-1). Sparse: 2 on the first ceil(p/20) coordinates, 0 elsewhere.
inline Eigen::VectorXd beta_true(const SimSetting& s) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.p);
  if (s.beta_pattern == BetaPattern::Dense) {
    if (s.p < 2) throw std::invalid_argument("dense beta pattern needs p >= 2");
    for (Eigen::Index j = 0; j < s.p; ++j) b(j) = 0.5 + static_cast<double>(j) * 2.0 / static_cast<double>(s.p - 1);
  } else {
    const Eigen::Index k = (s.p + 19) / 20;
    b.head(k).setConstant(2.0);
  }
  return b;
}

struct ErrorSample {
  Eigen::VectorXd values;
  Eigen::VectorXi contaminated;  // 1 where the contaminant component produced the value
  Eigen::VectorXd latent;        // the Gaussian AR(1) driver
};

/// Stationary N(0,1) AR(1) path.
inline Eigen::VectorXd gaussian_ar1(Eigen::Index n, double rho, RngStream& rng) {
  Eigen::VectorXd z(n);
  const double innov = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = (i == 0 ? 0.0 : rho * z(i - 1)) + (i == 0 ? 1.0 : innov) * rng.normal();
  return z;
}

inline ErrorSample generate_errors(Eigen::Index n, double rho, const ErrorDist& e, RngStream& rng) {
  e.validate();
  ErrorSample out;
  out.latent = gaussian_ar1(n, rho, rng);
  out.contaminated = Eigen::VectorXi::Zero(n);
  out.values.resize(n);
  switch (e.kind) {
    case ErrorKind::Normal: out.values = out.latent; break;
    case ErrorKind::StudentT: {
      if (rho == 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) out.values(i) = sample_student_t(e.df, rng);
        break;
      }
      const boost::math::students_t_distribution<double> t(e.df);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double z = out.latent(i);
        // use the upper tail for z > 0 so the uniform never rounds to 1
        out.values(i) = z <= 0.0 ? boost::math::quantile(t, standard_normal_cdf(z))
                                 : -boost::math::quantile(t, standard_normal_cdf(-z));
      }
      break;
    }
    default:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (rng.uniform() < e.weight) {
          out.values(i) = out.latent(i);
        } else {
          out.contaminated(i) = 1;
          out.values(i) = sample_contaminant(e, rng);
        }
      }
  }
  return out;
}

inline ErrorSample generate_errors(const SimSetting& s, RngStream& rng) {
  return generate_errors(s.n, s.rho_eps, s.error, rng);
}

/// Stationary Gaussian VAR(1) x_i = rho x_{i-1} + u_i with Cov(x_i) = sigma and
/// Cov(u_i) = (1 - rho^2) sigma.
inline Eigen::MatrixXd generate_var1(Eigen::Index n, const Eigen::MatrixXd& sigma, double rho, RngStream& rng) {
  const Eigen::Index p = sigma.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("infeasible predictor correlation: stationary covariance is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const double innov = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    if (i == 0) {
      X.row(i) = (L * z).transpose();
    } else {
      X.row(i) = rho * X.row(i - 1) + innov * (L * z).transpose();
    }
  }
  return X;
}

inline Eigen::MatrixXd equicorrelation(Eigen::Index p, double rho) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(p, p, rho);
  s.diagonal().setOnes();
  return s;
}

inline Eigen::MatrixXd generate_predictors(const SimSetting& s, RngStream& rng) {
  return generate_var1(s.n, equicorrelation(s.p, s.cross_correlation()), s.rho_x, rng);
}

struct SimulatedData {
  Dataset data;
  Eigen::VectorXd beta_true;
  Eigen::VectorXi contaminated;
};

inline std::vector<std::string> default_names(Eigen::Index p) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

/// y = X beta_true + eps. Predictors are drawn before errors.
inline SimulatedData generate_dataset(const SimSetting& s, RngStream& rng) {
  s.validate();
  SimulatedData out;
  out.beta_true = beta_true(s);
  out.data.X = generate_predictors(s, rng);
  ErrorSample e = generate_errors(s, rng);
  out.data.y = out.data.X * out.beta_true + e.values;
  out.data.names = default_names(s.p);
  out.contaminated = std::move(e.contaminated);
  return out;
}

/// Contamination-diagnostic design: p = 5, beta = (2, 2, 0, 0, 0), each predictor
/// AR(1) with serial correlation 0.4, x1 and x2 correlated at 0.9, the rest
/// independent; errors are N(0,1) AR(1) with rho 0.2 mixed with iid Cauchy(0, 5)
/// at the given contamination fraction.
inline SimulatedData generate_contamination_design(Eigen::Index n, double contamination, RngStream& rng) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(5, 5);
  sigma(0, 1) = sigma(1, 0) = 0.9;
  SimulatedData out;
  out.beta_true = Eigen::VectorXd::Zero(5);
  out.beta_true.head(2).setConstant(2.0);
  out.data.X = generate_var1(n, sigma, 0.4, rng);
  ErrorSample e = generate_errors(n, 0.2, ErrorDist::mix_cauchy(1.0 - contamination, 5.0), rng);
  out.data.y = out.data.X * out.beta_true + e.values;
  out.data.names = default_names(5);
  out.contaminated = std::move(e.contaminated);
  return out;
}

}  // namespace sphreg
