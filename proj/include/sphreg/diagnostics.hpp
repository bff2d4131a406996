#pragma once

// Contamination diagnostic: flag observations whose upper posterior percentile
// of lambda_i exceeds the Tukey fence, then refit without them.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphreg/chain.hpp"
#include "sphreg/model.hpp"
#include "sphreg/stats.hpp"

namespace sphreg {

struct OutlierReport {
  Eigen::VectorXd s;  // upper percentile of each lambda_i
  double threshold = 0.0;
  std::vector<Eigen::Index> flagged;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Per-observation empirical quantile of the recorded lambda draws.
inline Eigen::VectorXd lambda_percentiles(const PosteriorDraws& draws, double prob = 0.95) {
  if (!draws.has_lambda()) throw std::invalid_argument("lambda_percentiles: lambda draws were not recorded");
  const Eigen::Index n = draws.lambda.cols();
  Eigen::VectorXd s(n);
  std::vector<double> col(static_cast<std::size_t>(draws.lambda.rows()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < draws.lambda.rows(); ++k) col[static_cast<std::size_t>(k)] = draws.lambda(k, i);
    std::sort(col.begin(), col.end());
    s(i) = quantile_sorted(col, prob);
  }
  return s;
}

/// Flags s_i > q3 + 1.5 (q3 - q1).
inline OutlierReport tukey_flag(const Eigen::VectorXd& s) {
  if (s.size() < 4) throw std::invalid_argument("tukey_flag: need at least 4 observations");
  OutlierReport r;
  r.s = s;
  std::vector<double> sorted(s.data(), s.data() + s.size());
  std::sort(sorted.begin(), sorted.end());
  r.q1 = quantile_sorted(sorted, 0.25);
  r.q3 = quantile_sorted(sorted, 0.75);
  r.threshold = r.q3 + 1.5 * (r.q3 - r.q1);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > r.threshold) r.flagged.push_back(i);
  }
  return r;
}

struct FilterRefitResult {
  OutlierReport report;
  PosteriorDraws initial;
  PosteriorDraws refit;
  Dataset filtered;
};

/// Fit, flag by the 95% lambda percentiles, drop flagged rows and refit on a
/// fresh stream (stream_id + 1).
inline FilterRefitResult filter_and_refit(const Dataset& d, const ModelSpec& spec, const McmcConfig& cfg,
                                          RngStream& rng, double prob = 0.95) {
  if (spec.loss() == LossKind::L2) {
    throw UnsupportedOperation(
        "L2 model lacks an outlier-filtered refit version as it does not include the lambda_i parameters");
  }
  McmcConfig c = cfg;
  c.record_lambda = true;
  FilterRefitResult out;
  const std::uint64_t seed = rng.seed();
  const std::uint64_t stream = rng.stream_id();
  out.initial = run_chain(d, spec, c, rng);
  out.report = tukey_flag(lambda_percentiles(out.initial, prob));
  out.filtered = d.without_rows(out.report.flagged);
  if (out.filtered.n() == 0) throw std::runtime_error("filter_and_refit: every observation was flagged");
  if (spec.prior == PriorKind::Ridge) {
    const Eigen::Index active = d.p() + (spec.ridge.include_intercept ? 1 : 0);
    if (out.filtered.n() < active) {
      throw std::runtime_error("filter_and_refit: " + std::to_string(out.filtered.n()) +
                               " rows left, fewer than the " + std::to_string(active) + " regression parameters");
    }
  }
  RngStream refit_rng(seed, stream + 1);
  out.refit = run_chain(out.filtered, spec, cfg, refit_rng);
  return out;
}

}  // namespace sphreg
