#pragma once

// Shared oracles for the unit and acceptance tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace sphreg::testing {

using Pdf = std::function<double(double)>;

/// Integral of pdf over [lo, hi]; lo may be -inf.
inline double integrate(const Pdf& pdf, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (std::isinf(lo) || std::isinf(hi)) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, lo, hi, 15, 1e-13);
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(pdf, lo, hi, 1e-13);
}

/// Kolmogorov-Smirnov distance between the sample and the distribution with
/// density pdf supported on [lower, inf). The CDF at each sorted draw is built by
/// quadrature: adaptive from lower to the first draw, then 20-point
/// Gauss-Legendre between consecutive draws.
inline double ks_distance(std::vector<double> x, const Pdf& pdf, double lower) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double cdf = integrate(pdf, lower, x.front());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && x[i] > x[i - 1]) {
      cdf += boost::math::quadrature::gauss<double, 20>::integrate(pdf, x[i - 1], x[i]);
    }
    const double k = static_cast<double>(i);
    d = std::max({d, std::abs(cdf - k / n), std::abs((k + 1.0) / n - cdf)});
  }
  return d;
}

/// KS distance against a closed-form CDF.
inline double ks_distance_cdf(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    const double k = static_cast<double>(i);
    d = std::max({d, std::abs(f - k / n), std::abs((k + 1.0) / n - f)});
  }
  return d;
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sd(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Monte Carlo standard error of the mean of a correlated series by batch means.
inline double batch_means_se(const Eigen::Ref<const Eigen::VectorXd>& x, int n_batches = 50) {
  const Eigen::Index b = x.size() / n_batches;
  Eigen::VectorXd means(n_batches);
  for (int k = 0; k < n_batches; ++k) means(k) = x.segment(k * b, b).mean();
  const double m = means.mean();
  const double var = (means.array() - m).square().sum() / (n_batches - 1);
  return std::sqrt(var / n_batches);
}

/// Median of a copy.
inline double median_of(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

/// Log density of N(0, S) at r via a dense Cholesky factor.
inline double mvn_log_density(const Eigen::VectorXd& r, const Eigen::MatrixXd& S) {
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  const Eigen::VectorXd z = llt.matrixL().solve(r);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + logdet + static_cast<double>(r.size()) * std::log(2.0 * M_PI));
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace sphreg::testing
