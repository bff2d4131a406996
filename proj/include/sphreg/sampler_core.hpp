#pragma once

// Slice-within-Gibbs sampler for the ridge prior, with the L1 and L2 variants.
//
// One sweep updates, in order: mu, beta, alpha^2 (lambda integrated out), lambda, sigma^2.
// Drawing alpha^2 from its lambda-marginal conditional and then lambda given the new
// alpha^2 is a joint draw of (alpha^2, lambda), so the sweep leaves the posterior
// invariant. Putting the lambda draw before the collapsed alpha^2 step would not.
//
// Variants:
//   SPH  lambda_i ~ GIG(1 + alpha^2, alpha^2 + e_i^2, 1/2)
//   UPH  lambda_i ~ GIG(alpha^2, alpha^2 + e_i^2, 1/2)
//   L1   lambda_i ~ GIG(2, e_i^2, 1/2), alpha^2 untouched
//   L2   lambda_i = 1 and sigma^2 is the common variance, alpha^2 untouched
// with e_i = (y_i - mu - x_i'beta) / sigma.

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "sphreg/distributions.hpp"
#include "sphreg/model.hpp"
#include "sphreg/rng.hpp"
#include "sphreg/slice.hpp"
#include "sphreg/special_math.hpp"
#include "sphreg/sph_model.hpp"

namespace sphreg {

struct Alpha2Prior {
  bool enabled = false;
  double a = 1.0;  // shape
  double b = 1.0;  // rate
};

/// Log density of alpha^2 given scaled residuals with lambda integrated out,
/// up to an additive constant:
///
///   -(n/2) log alpha^2 - n log K1(c alpha) - c sum_i sqrt(alpha^2 + e_i^2) [+ log Gamma(a, b) prior]
///
/// with c^2 = 1 + alpha^2 (SPH) or alpha^2 (UPH). Written with the scaled
/// Bessel function as
///
///   -n log alpha - n log(e^{z} K1(z)) - c sum_i e_i^2 / (alpha + sqrt(alpha^2 + e_i^2)),  z = c alpha
///
/// which is the same number without the large cancelling terms.
inline double log_alpha2_conditional(double alpha2, const Eigen::Ref<const Eigen::VectorXd>& residuals_scaled,
                                     const Alpha2Prior& prior = {}, LossKind kind = LossKind::SPH) {
  if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) return -std::numeric_limits<double>::infinity();
  const double alpha = std::sqrt(alpha2);
  const double c = std::sqrt(mixing_rate_sq(kind, alpha2));
  const double n = static_cast<double>(residuals_scaled.size());
  double out = 0.0;
  if (n > 0) {
    double tail = 0.0;
    for (Eigen::Index i = 0; i < residuals_scaled.size(); ++i) {
      const double e2 = residuals_scaled(i) * residuals_scaled(i);
      tail += e2 / (alpha + std::sqrt(alpha2 + e2));
    }
    out = -n * std::log(alpha) - n * std::log(bessel_k(1.0, c * alpha).scaled_value) - c * tail;
  }
  if (prior.enabled) out += (prior.a - 1.0) * std::log(alpha2) - prior.b * alpha2;
  return out;
}

namespace detail {

inline Alpha2Prior alpha2_prior_of(const ErrorModelSpec& spec) {
  return {spec.alpha_prior, spec.a_alpha, spec.b_alpha};
}

inline void check_dims(const ChainState& s, const Dataset& d) {
  if (s.beta.size() != d.p() || s.lambda.size() != d.n()) {
    throw std::invalid_argument("chain state dimensions do not match the data");
  }
}

}  // namespace detail

// ------------------------------------------------------------ shared blocks

/// mu | rest ~ N(v m, sigma^2 v), v = 1 / (1/tau_mu^2 + sum 1/lambda_i), m = sum (y_i - x_i'beta)/lambda_i.
inline void update_mu(ChainState& s, const Dataset& d, const ErrorModelSpec& spec, RngStream& rng) {
  if (!spec.include_intercept) {
    s.mu = 0.0;
    return;
  }
  const Eigen::VectorXd r = d.y - d.X * s.beta;
  const double prec = 1.0 / spec.tau_mu2 + s.lambda.cwiseInverse().sum();
  const double m = (r.array() / s.lambda.array()).sum();
  const double v = 1.0 / prec;
  const double sigma2 = spec.sigma_active() ? s.sigma2 : 1.0;
  s.mu = sample_normal(v * m, std::sqrt(sigma2 * v), rng);
}

/// Scaled residuals (y - mu - X beta) / sigma.
inline Eigen::VectorXd scaled_residuals(const ChainState& s, const Dataset& d, const ErrorModelSpec& spec) {
  Eigen::VectorXd r = d.y - d.X * s.beta;
  r.array() -= s.mu;
  if (spec.sigma_active()) r /= std::sqrt(s.sigma2);
  return r;
}

/// One slice move on alpha^2 over (0, inf). No-op for L1/L2.
inline void update_alpha2(ChainState& s, const Dataset& d, const ErrorModelSpec& spec, const McmcConfig& cfg,
                          RngStream& rng) {
  if (!spec.alpha_active() || cfg.fix_alpha2) return;
  const Eigen::VectorXd e = scaled_residuals(s, d, spec);
  const Alpha2Prior prior = detail::alpha2_prior_of(spec);
  auto target = [&](double a2) { return log_alpha2_conditional(a2, e, prior, spec.loss); };
  s.alpha2 = slice_sample_step(target, s.alpha2, cfg.slice_width, cfg.slice_max_steps,
                               Interval{0.0, std::numeric_limits<double>::infinity()}, rng);
}

/// lambda_i | rest for each observation.
inline void update_lambda(ChainState& s, const Dataset& d, const ErrorModelSpec& spec, const McmcConfig& cfg,
                          RngStream& rng) {
  if (cfg.fix_lambda) return;
  if (spec.loss == LossKind::L2) {
    s.lambda.setOnes();
    return;
  }
  const Eigen::VectorXd e = scaled_residuals(s, d, spec);
  if (spec.loss == LossKind::L1) {
    for (Eigen::Index i = 0; i < e.size(); ++i) s.lambda(i) = sample_gig({2.0, e(i) * e(i), 0.5}, rng);
    return;
  }
  const double a = mixing_rate_sq(spec.loss, s.alpha2);
  for (Eigen::Index i = 0; i < e.size(); ++i) s.lambda(i) = sample_gig({a, s.alpha2 + e(i) * e(i), 0.5}, rng);
}

// -------------------------------------------------------------- ridge blocks

/// beta | rest ~ N(P^{-1} b, sigma^2 P^{-1}), P = X' L^{-1} X + Q, b = X' L^{-1} (y - mu) + Q beta0.
inline void update_beta_ridge(ChainState& s, const Dataset& d, const RidgeSpec& spec, const McmcConfig& cfg,
                              RngStream& rng) {
  const Eigen::Index p = d.p();
  if (p == 0) return;
  const Eigen::VectorXd w = s.lambda.cwiseInverse();
  const Eigen::VectorXd beta0 = spec.beta0_or_default(p);
  const Eigen::MatrixXd Q = spec.Q_or_default(p);
  Eigen::MatrixXd P = Q;
  P.selfadjointView<Eigen::Lower>().rankUpdate(d.X.transpose() * w.cwiseSqrt().asDiagonal());
  P.triangularView<Eigen::StrictlyUpper>() = P.transpose();
  Eigen::VectorXd yc = d.y;
  yc.array() -= s.mu;
  const Eigen::VectorXd b = d.X.transpose() * w.cwiseProduct(yc) + Q * beta0;

  Eigen::LLT<Eigen::MatrixXd> llt;
  try {
    llt = cholesky_with_jitter(P, cfg.jitter());
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("beta update: X'L^-1X + Q not positive definite (max lambda ") +
                              std::to_string(s.lambda.maxCoeff()) + ", min lambda " +
                              std::to_string(s.lambda.minCoeff()) + "): " + e.what());
  }
  const Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
  const double sigma = spec.sigma_active() ? std::sqrt(s.sigma2) : 1.0;
  s.beta = mean + sigma * llt.matrixU().solve(z);
}

/// sigma^2 | rest ~ Inv-Gamma(a_sigma + (n + p [+1])/2,
///                            b_sigma + (r'L^{-1}r + (beta-beta0)'Q(beta-beta0) [+ mu^2/tau_mu^2]) / 2),
/// the bracketed terms present when an intercept is modeled (its prior is N(0, sigma^2 tau_mu^2)).
inline void update_sigma2_ridge(ChainState& s, const Dataset& d, const RidgeSpec& spec, const McmcConfig& cfg,
                                RngStream& rng) {
  if (!spec.sigma_active() || cfg.fix_sigma2) return;
  const Eigen::Index p = d.p();
  Eigen::VectorXd r = d.y - d.X * s.beta;
  r.array() -= s.mu;
  const Eigen::VectorXd db = s.beta - spec.beta0_or_default(p);
  double quad = (r.array().square() / s.lambda.array()).sum() + db.dot(spec.Q_or_default(p) * db);
  double shape = spec.a_sigma + 0.5 * static_cast<double>(d.n() + p);
  if (spec.include_intercept) {
    quad += s.mu * s.mu / spec.tau_mu2;
    shape += 0.5;
  }
  s.sigma2 = sample_inverse_gamma(shape, spec.b_sigma + 0.5 * quad, rng);
}

/// Starting point: ridge solve on centered data, mu from the mean residual,
/// lambda = 1, sigma^2 = 1, alpha^2 = 1.
inline ChainState initialize_ridge(const Dataset& d, const RidgeSpec& spec) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  ChainState s;
  s.lambda = Eigen::VectorXd::Ones(n);
  s.beta = Eigen::VectorXd::Zero(p);
  if (p > 0 && n > 0) {
    Eigen::MatrixXd Xc = d.X;
    Eigen::VectorXd yc = d.y;
    if (spec.include_intercept) {
      Xc.rowwise() -= d.X.colwise().mean();
      yc.array() -= d.y.mean();
    }
    const Eigen::MatrixXd Q = spec.Q_or_default(p);
    const Eigen::MatrixXd A = Xc.transpose() * Xc + Q;
    s.beta = cholesky_with_jitter(A).solve(Xc.transpose() * yc + Q * spec.beta0_or_default(p));
  } else if (p > 0) {
    s.beta = spec.beta0_or_default(p);
  }
  s.mu = (spec.include_intercept && n > 0) ? (d.y - d.X * s.beta).mean() : 0.0;
  s.sigma2 = 1.0;
  s.alpha2 = 1.0;
  return s;
}

/// One full sweep under the ridge prior; the loss variant comes from spec.loss.
inline void gibbs_step_ridge(ChainState& s, const Dataset& d, const RidgeSpec& spec, const McmcConfig& cfg,
                             RngStream& rng) {
  detail::check_dims(s, d);
  update_mu(s, d, spec, rng);
  update_beta_ridge(s, d, spec, cfg, rng);
  update_alpha2(s, d, spec, cfg, rng);
  update_lambda(s, d, spec, cfg, rng);
  update_sigma2_ridge(s, d, spec, cfg, rng);
}

inline void gibbs_step_l1(ChainState& s, const Dataset& d, RidgeSpec spec, const McmcConfig& cfg, RngStream& rng) {
  spec.loss = LossKind::L1;
  gibbs_step_ridge(s, d, spec, cfg, rng);
}

inline void gibbs_step_l2(ChainState& s, const Dataset& d, RidgeSpec spec, const McmcConfig& cfg, RngStream& rng) {
  spec.loss = LossKind::L2;
  gibbs_step_ridge(s, d, spec, cfg, rng);
}

}  // namespace sphreg
