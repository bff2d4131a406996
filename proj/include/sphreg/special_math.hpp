#pragma once

// Modified Bessel function of the second kind for real order in [0, 3] and
// positive real argument, evaluated in exponentially scaled form so that the
// result never under- or overflows for arguments up to ~1e300.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphreg {

struct BesselResult {
  double log_value;     // log K_nu(x)
  double scaled_value;  // exp(x) * K_nu(x)
};

namespace detail {

// Taylor coefficients of 1/Gamma(1+z) about z = 0.
inline constexpr std::array<double, 28> kRecipGammaTaylor = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),  gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
// plus 1/G(1+mu) and 1/G(1-mu). Evaluated from the even/odd parts of the
// series so gam1 does not suffer cancellation near mu = 0.
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

inline TemmeGammas temme_gammas(double mu) {
  const double mu2 = mu * mu;
  double even = 0.0;
  double odd = 0.0;
  for (int k = static_cast<int>(kRecipGammaTaylor.size()) - 1; k >= 0; --k) {
    if (k % 2 == 0) {
      even = even * mu2 + kRecipGammaTaylor[k];
    } else {
      odd = odd * mu2 + kRecipGammaTaylor[k];
    }
  }
  // g(mu) = even + mu * odd, g(-mu) = even - mu * odd
  return {-odd, even, even + mu * odd, even - mu * odd};
}

// K_mu(x) and K_{mu+1}(x), both multiplied by exp(x), for |mu| <= 1/2.
struct KPair {
  double k_mu, k_mu1;
};

inline constexpr double kSeriesLimit = 2.0;
inline constexpr double kAsymptoticLimit = 25.0;

inline KPair scaled_k_temme_series(double mu, double x) {
  constexpr double eps = 1e-17;
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < eps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i < 500; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= (di - mu);
    q /= (di + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - di * ff);
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  const double scale = std::exp(x);
  return {sum * scale, sum1 * (2.0 / x) * scale};
}

// Steed's continued fraction (CF2) for 2 <= x, scaled.
inline KPair scaled_k_steed(double mu, double x) {
  constexpr double eps = 1e-17;
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1};
}

// Hankel asymptotic expansion of exp(x) K_nu(x); truncated at the smallest term.
inline double scaled_k_asymptotic(double nu, double x) {
  const double four_nu2 = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (four_nu2 - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * sum;
}

}  // namespace detail

/// Modified Bessel function of the second kind K_nu(x), returned both as its
/// natural log and in the exponentially scaled form exp(x) K_nu(x).
///
/// Small arguments use Temme's series, intermediate ones Steed's continued
/// fraction, and x >= 25 the Hankel asymptotic expansion. Integer-offset orders
/// are reached by forward recurrence from |mu| <= 1/2, which is stable for K.
inline BesselResult bessel_k(double nu, double x) {
  if (!(x > 0.0) || std::isnan(x)) {
    throw std::domain_error("bessel_k: argument must be positive");
  }
  if (!(nu >= 0.0)) {
    throw std::domain_error("bessel_k: order must be non-negative");
  }
  double scaled;
  if (x >= detail::kAsymptoticLimit) {
    scaled = detail::scaled_k_asymptotic(nu, x);
  } else {
    const int steps = static_cast<int>(nu + 0.5);
    const double mu = nu - steps;
    detail::KPair k = x < detail::kSeriesLimit ? detail::scaled_k_temme_series(mu, x)
                                               : detail::scaled_k_steed(mu, x);
    const double two_over_x = 2.0 / x;
    for (int i = 1; i <= steps; ++i) {
      const double next = (mu + i) * two_over_x * k.k_mu1 + k.k_mu;
      k.k_mu = k.k_mu1;
      k.k_mu1 = next;
    }
    scaled = k.k_mu;
  }
  return {std::log(scaled) - x, scaled};
}

/// log K_nu(x); shorthand for bessel_k(nu, x).log_value.
inline double log_bessel_k(double nu, double x) { return bessel_k(nu, x).log_value; }

}  // namespace sphreg
