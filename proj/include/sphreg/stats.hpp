#pragma once

// Small empirical summaries shared by diagnostics and metrics.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sphreg {

/// Quantile by linear interpolation between order statistics: h = (n-1) prob,
/// x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]) on the sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> x, double prob) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, prob);
}

inline double quantile(const Eigen::Ref<const Eigen::VectorXd>& x, double prob) {
  return quantile(std::vector<double>(x.data(), x.data() + x.size()), prob);
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

}  // namespace sphreg
