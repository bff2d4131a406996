#pragma once

// Random variates and log densities.
//
// Parameterizations:
//   Gamma(a, b)               rate b, mean a/b
//   Inv-Gamma(a, b)           density b^a/G(a) x^(-a-1) exp(-b/x), mean b/(a-1)
//   Inv-Gaussian(mu, sigma)   mean mu, shape sigma, variance mu^3/sigma
//   GIG(a, b, p)              density (a/b)^(p/2) / (2 K_p(sqrt(ab))) x^(p-1) exp(-(a x + b/x)/2)
//   Beta(a, b), Bernoulli(p), N(m, s^2), N_k(m, S)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "sphreg/rng.hpp"
#include "sphreg/special_math.hpp"

namespace sphreg {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GigParams {
  double a;  // rate on x
  double b;  // rate on 1/x
  double p;  // index
};

// ---------------------------------------------------------------- univariate

inline double sample_normal(double mean, double sd, RngStream& rng) { return mean + sd * rng.normal(); }

/// Gamma(shape, rate) by Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
inline double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw std::domain_error("sample_gamma: shape and rate must be positive");
  }
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::exp(std::log(rng.uniform()) / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

inline double sample_inverse_gamma(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("sample_inverse_gamma: parameters must be positive");
  }
  return b / sample_gamma(a, 1.0, rng);
}

inline double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("sample_beta: parameters must be positive");
  }
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

inline bool sample_bernoulli(double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("sample_bernoulli: probability outside [0, 1]");
  }
  return rng.uniform() < p;
}

/// Inverse Gaussian with mean mu and shape sigma (Michael, Schucany & Haas).
/// The smaller root is formed as mu / (1 + r + sqrt(r (2 + r))) so that it
/// stays accurate when mu * y / sigma is huge.
inline double sample_inverse_gaussian(double mu, double sigma, RngStream& rng) {
  if (!(mu > 0.0) || !(sigma > 0.0) || std::isnan(mu) || std::isnan(sigma)) {
    throw std::domain_error("sample_inverse_gaussian: mu and sigma must be positive");
  }
  const double z = rng.normal();
  const double y = z * z;
  const double r = mu * y / (2.0 * sigma);
  const double x1 = mu / (1.0 + r + std::sqrt(r) * std::sqrt(2.0 + r));
  if (rng.uniform() * (mu + x1) <= mu) return x1;
  return mu * (mu / x1);
}

inline double sample_student_t(double df, RngStream& rng) {
  if (!(df > 0.0)) throw std::domain_error("sample_student_t: df must be positive");
  return rng.normal() / std::sqrt(sample_gamma(0.5 * df, 0.5 * df, rng));
}

inline double sample_cauchy(double location, double scale, RngStream& rng) {
  return location + scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
}

namespace detail {

inline double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

// Ratio-of-uniforms without mode shift (Dagpunar; Lehner).
inline double gig_rou_noshift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Constant hat on the log-concave part (Hormann & Leydold), for 0 <= lambda < 1, omega <= 1.
inline double gig_new_approach(double lambda, double omega, RngStream& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double area[3];
  double k1, k2;
  area[0] = k0 * x0;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    area[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area[1] = lambda == 0.0 ? k1 * std::log(2.0 / (omega * omega))
                            : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area[0] + area[1] + area[2];
  for (;;) {
    double v = total * rng.uniform();
    double x, hx;
    if (v <= area[0]) {
      x = x0 * v / area[0];
      hx = k0;
    } else {
      v -= area[0];
      if (v <= area[1]) {
        if (lambda == 0.0) {
          x = omega * std::exp(std::exp(omega) * v);
          hx = k1 / x;
        } else {
          x = std::pow(std::pow(x0, lambda) + lambda / k1 * v, 1.0 / lambda);
          hx = k1 * std::pow(x, lambda - 1.0);
        }
      } else {
        v -= area[1];
        const double a = x0 > 2.0 / omega ? x0 : 2.0 / omega;
        x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * a) - omega / (2.0 * k2) * v);
        hx = k2 * std::exp(-omega / 2.0 * x);
      }
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

// Ratio-of-uniforms shifted by the mode (Dagpunar; Lehner), bounds by Cardano.
inline double gig_rou_shift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);
  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x <= 0.0) continue;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

}  // namespace detail

/// GIG(a, b, p) variate.
///
/// p = +-1/2 goes through the inverse Gaussian: GIG(a, b, -1/2) is IG(sqrt(b/a), b)
/// and GIG(a, b, 1/2) = 1 / GIG(b, a, -1/2). b = 0 with p > 0 is the
/// Gamma(p, a/2) limit. Other p use the Hormann-Leydold ratio-of-uniforms family.
inline double sample_gig(const GigParams& g, RngStream& rng) {
  if (!(g.a > 0.0) || std::isnan(g.b) || g.b < 0.0 || !std::isfinite(g.p)) {
    throw std::domain_error("sample_gig: need a > 0 and b >= 0");
  }
  if (g.b == 0.0) {
    if (g.p > 0.0) return sample_gamma(g.p, 0.5 * g.a, rng);
    throw std::domain_error("sample_gig: b = 0 requires p > 0");
  }
  if (g.p == 0.5) return 1.0 / sample_inverse_gaussian(std::sqrt(g.a / g.b), g.a, rng);
  if (g.p == -0.5) return sample_inverse_gaussian(std::sqrt(g.b / g.a), g.b, rng);

  const double lambda = std::abs(g.p);
  const double omega = std::sqrt(g.a * g.b);
  const double scale = std::sqrt(g.b / g.a);
  double x;
  if (lambda > 2.0 || omega > 3.0) {
    x = detail::gig_rou_shift(lambda, omega, rng);
  } else if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = detail::gig_rou_noshift(lambda, omega, rng);
  } else {
    x = detail::gig_new_approach(lambda, omega, rng);
  }
  return g.p < 0.0 ? scale / x : scale * x;
}

// ------------------------------------------------------------------ densities

inline double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double gamma_log_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -INFINITY;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double inverse_gamma_log_pdf(double x, double a, double b) {
  if (!(x > 0.0)) return -INFINITY;
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

inline double beta_log_pdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return -INFINITY;
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

inline double inverse_gaussian_log_pdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) return -INFINITY;
  const double d = x - mu;
  return 0.5 * std::log(sigma / (2.0 * std::numbers::pi)) - 1.5 * std::log(x) -
         sigma * d * d / (2.0 * mu * mu * x);
}

/// Log normalizing constant of GIG(a, b, p), a, b > 0.
inline double gig_log_norm_const(const GigParams& g) {
  const double w = std::sqrt(g.a * g.b);
  return 0.5 * g.p * std::log(g.a / g.b) - std::numbers::ln2 - log_bessel_k(std::abs(g.p), w);
}

inline double gig_log_pdf(double x, const GigParams& g) {
  if (!(x > 0.0)) return -INFINITY;
  return gig_log_norm_const(g) + (g.p - 1.0) * std::log(x) - 0.5 * (g.a * x + g.b / x);
}

/// E[X] for GIG(a, b, p) with a, b > 0.
inline double gig_mean(const GigParams& g) {
  const double w = std::sqrt(g.a * g.b);
  const BesselResult num = bessel_k(std::abs(g.p + 1.0), w);
  const BesselResult den = bessel_k(std::abs(g.p), w);
  return std::sqrt(g.b / g.a) * num.scaled_value / den.scaled_value;
}

// -------------------------------------------------------------- multivariate

enum class MatrixKind { Covariance, Precision };

struct JitterPolicy {
  double start = 1e-10;
  double max = 1e-4;
};

/// Cholesky factor of a symmetric matrix, adding diagonal jitter start, 10*start, ...
/// up to max (scaled by the mean diagonal) when the plain factorization fails.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& m, const JitterPolicy& jitter = {}) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const Eigen::Index k = m.rows();
  const double diag_scale = k > 0 ? std::max(m.diagonal().cwiseAbs().mean(), 1e-300) : 1.0;
  for (double eps = jitter.start; eps <= jitter.max * (1.0 + 1e-12); eps *= 10.0) {
    Eigen::MatrixXd jittered = m;
    jittered.diagonal().array() += eps * diag_scale;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw SingularMatrixError("cholesky factorization failed after jitter up to " + std::to_string(jitter.max));
}

/// Draw from N_k(mean, S) where matrix is either S or S^{-1}.
inline Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& matrix, MatrixKind kind,
                                  RngStream& rng, const JitterPolicy& jitter = {}) {
  const Eigen::Index k = mean.size();
  if (matrix.rows() != k || matrix.cols() != k) {
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(matrix, jitter);
  Eigen::VectorXd z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
  if (kind == MatrixKind::Covariance) return mean + llt.matrixL() * z;
  return mean + llt.matrixU().solve(z);
}

}  // namespace sphreg
