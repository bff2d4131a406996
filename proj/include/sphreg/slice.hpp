#pragma once

// Univariate stepping-out and shrinkage slice sampler (Neal 2003).

#include <cmath>
#include <limits>
#include <string>

#include "sphreg/model.hpp"
#include "sphreg/rng.hpp"

namespace sphreg {

struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lower && x < upper; }
};

inline constexpr int kMaxShrinkSteps = 1000;

/// One slice-sampling update of current under log_density on the open domain.
///
/// The initial interval of length width is placed at random around current and
/// stepped out at most max_steps times in total, never past the domain
/// boundary. max_steps = 0 gives a pure shrinkage update.
template <class LogDensity>
double slice_sample_step(LogDensity&& log_density, double current, double width, int max_steps,
                         const Interval& domain, RngStream& rng) {
  if (!domain.contains(current)) throw SamplerError("slice_sample_step: current point outside domain");
  const double f0 = log_density(current);
  if (!std::isfinite(f0)) {
    throw SamplerError("slice_sample_step: log density not finite at current point " + std::to_string(current));
  }
  const double level = f0 - rng.exponential();

  double left = current - width * rng.uniform();
  double right = left + width;
  int j = static_cast<int>(std::floor(max_steps * rng.uniform()));
  int k = max_steps - 1 - j;
  if (max_steps == 0) j = k = 0;
  while (j > 0 && left > domain.lower && log_density(left) > level) {
    left -= width;
    --j;
  }
  while (k > 0 && right < domain.upper && log_density(right) > level) {
    right += width;
    --k;
  }
  if (left < domain.lower) left = domain.lower;
  if (right > domain.upper) right = domain.upper;

  for (int s = 0; s < kMaxShrinkSteps; ++s) {
    const double x = left + (right - left) * rng.uniform();
    if (domain.contains(x) && log_density(x) >= level) return x;
    if (x < current) {
      left = x;
    } else {
      right = x;
    }
  }
  throw SamplerError("slice_sample_step: shrinkage did not terminate after 1000 steps");
}

}  // namespace sphreg
