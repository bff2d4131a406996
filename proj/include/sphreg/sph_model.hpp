#pragma once

// Robust losses and the error density generated by the scaled pseudo-Huber loss.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sphreg/distributions.hpp"
#include "sphreg/rng.hpp"
#include "sphreg/special_math.hpp"

namespace sphreg {

enum class LossKind { SPH, UnscaledPH, Huber, L1, L2 };

struct LossVariant {
  LossKind kind = LossKind::SPH;
  double alpha = 1.0;  // ignored for L1/L2
};

inline std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::SPH: return "sph";
    case LossKind::UnscaledPH: return "uph";
    case LossKind::Huber: return "huber";
    case LossKind::L1: return "l1";
    case LossKind::L2: return "l2";
  }
  return "?";
}

inline LossKind parse_loss_kind(std::string_view s) {
  if (s == "sph") return LossKind::SPH;
  if (s == "uph" || s == "unscaled_ph") return LossKind::UnscaledPH;
  if (s == "huber") return LossKind::Huber;
  if (s == "l1") return LossKind::L1;
  if (s == "l2") return LossKind::L2;
  throw std::invalid_argument("unknown loss '" + std::string(s) + "' (expected sph, uph, huber, l1, l2)");
}

/// Loss value at residual t.
///
///   SPH    a sqrt(a^2+1) (sqrt(1 + t^2/a^2) - 1)
///   UPH    a^2 (sqrt(1 + t^2/a^2) - 1)
///   Huber  t^2 for |t| <= 1/a, 2|t|/a - 1/a^2 beyond
///   L1     |t|
///   L2     t^2
///
/// The pseudo-Huber forms are evaluated as t^2 / (sqrt(1 + t^2/a^2) + 1) times a
/// prefactor, which avoids cancellation for small t/a.
inline double loss(const LossVariant& v, double t) {
  switch (v.kind) {
    case LossKind::SPH:
    case LossKind::UnscaledPH: {
      if (!(v.alpha > 0.0)) throw std::domain_error("loss: alpha must be positive");
      const double a = v.alpha;
      const double r = t / a;
      const double base = t * t / (std::sqrt(1.0 + r * r) + 1.0);
      return v.kind == LossKind::SPH ? std::sqrt(1.0 + a * a) / a * base : base;
    }
    case LossKind::Huber: {
      if (!(v.alpha > 0.0)) throw std::domain_error("loss: alpha must be positive");
      const double at = std::abs(t);
      const double k = 1.0 / v.alpha;
      return at <= k ? t * t : 2.0 * at * k - k * k;
    }
    case LossKind::L1: return std::abs(t);
    case LossKind::L2: return t * t;
  }
  return 0.0;
}

struct SphDensity {
  double alpha;
  double log_norm_const;  // log C2(alpha)
};

/// log C2 = -z - log(2 alpha) - log K1(z), z = alpha sqrt(1 + alpha^2).
inline SphDensity make_sph_density(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("make_sph_density: alpha must be positive");
  const double z = alpha * std::sqrt(1.0 + alpha * alpha);
  // log K1(z) = log(scaled) - z, so the -z terms cancel
  const double log_c2 = -std::log(2.0 * alpha) - std::log(bessel_k(1.0, z).scaled_value);
  return {alpha, log_c2};
}

inline double log_density(const SphDensity& d, double eps) {
  return d.log_norm_const - loss({LossKind::SPH, d.alpha}, eps);
}

/// Squared mixing rate c^2 of the GIG(c^2, alpha^2, 1) scale mixture whose
/// marginal is proportional to exp(-c sqrt(alpha^2 + eps^2)).
/// SPH uses c^2 = 1 + alpha^2, the unscaled pseudo-Huber c^2 = alpha^2.
inline double mixing_rate_sq(LossKind kind, double alpha2) {
  switch (kind) {
    case LossKind::SPH: return 1.0 + alpha2;
    case LossKind::UnscaledPH: return alpha2;
    default: throw std::invalid_argument("mixing_rate_sq: loss has no GIG mixture with free alpha");
  }
}

/// Draw eps with lambda ~ GIG(1 + alpha^2, alpha^2, 1), eps | lambda ~ N(0, lambda).
inline double sample_sph_error(double alpha, RngStream& rng) {
  if (!(alpha > 0.0)) throw std::domain_error("sample_sph_error: alpha must be positive");
  const double a2 = alpha * alpha;
  const double lambda = sample_gig({1.0 + a2, a2, 1.0}, rng);
  return std::sqrt(lambda) * rng.normal();
}

}  // namespace sphreg
