#pragma once

// JSON summaries and draw CSVs.

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sphreg/diagnostics.hpp"
#include "sphreg/io/csv.hpp"
#include "sphreg/model.hpp"
#include "sphreg/stats.hpp"
#include "sphreg/version.hpp"

namespace sphreg::io {

using nlohmann::ordered_json;

inline ordered_json provenance(std::uint64_t seed, const std::string& spec_hash) {
  ordered_json j;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["spec_hash"] = spec_hash;
  return j;
}

/// mean, sd, and the equi-tailed interval at level.
inline ordered_json summarize(const Eigen::Ref<const Eigen::VectorXd>& x, double level) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const double mean = x.mean();
  const double var = x.size() > 1 ? (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1) : 0.0;
  const double tail = 0.5 * (1.0 - level);
  ordered_json j;
  j["mean"] = mean;
  j["sd"] = std::sqrt(var);
  j["lower"] = quantile_sorted(v, tail);
  j["upper"] = quantile_sorted(v, 1.0 - tail);
  return j;
}

inline std::string predictor_name(const std::vector<std::string>& names, Eigen::Index j) {
  return names.empty() ? "x" + std::to_string(j + 1) : names[static_cast<std::size_t>(j)];
}

inline ordered_json posterior_summary(const PosteriorDraws& draws, const std::vector<std::string>& names, double level) {
  ordered_json j;
  j["loss"] = std::string(to_string(draws.loss));
  j["prior"] = std::string(to_string(draws.prior));
  j["n_burnin"] = draws.n_burnin;
  j["n_draws"] = draws.n_draws();
  j["level"] = level;
  ordered_json coefs = ordered_json::array();
  const Eigen::VectorXd incl = draws.inclusion_prob();
  for (Eigen::Index k = 0; k < draws.beta.cols(); ++k) {
    ordered_json c;
    c["name"] = predictor_name(names, k);
    c.update(summarize(draws.beta.col(k), level));
    if (draws.prior == PriorKind::SpikeSlab) c["inclusion_prob"] = incl(k);
    coefs.push_back(std::move(c));
  }
  j["coefficients"] = std::move(coefs);
  if (draws.has_intercept) j["intercept"] = summarize(draws.mu, level);
  if (draws.loss == LossKind::SPH || draws.loss == LossKind::UnscaledPH) j["alpha2"] = summarize(draws.alpha2, level);
  if (draws.has_sigma) j["sigma2"] = summarize(draws.sigma2, level);
  if (draws.prior == PriorKind::SpikeSlab) j["q"] = summarize(draws.q, level);
  return j;
}

/// One row per retained iteration.
inline void write_draws_csv(std::ostream& out, const PosteriorDraws& draws, const std::vector<std::string>& names) {
  const bool ss = draws.prior == PriorKind::SpikeSlab;
  out << "iteration,mu";
  for (Eigen::Index k = 0; k < draws.beta.cols(); ++k) out << ',' << predictor_name(names, k);
  out << ",sigma2,alpha2";
  if (ss) {
    out << ",q";
    for (Eigen::Index k = 0; k < draws.beta.cols(); ++k) out << ",gamma_" << predictor_name(names, k);
  }
  out << '\n';
  for (Eigen::Index t = 0; t < draws.n_draws(); ++t) {
    out << t << ',' << format_double(draws.mu(t));
    for (Eigen::Index k = 0; k < draws.beta.cols(); ++k) out << ',' << format_double(draws.beta(t, k));
    out << ',' << format_double(draws.sigma2(t)) << ',' << format_double(draws.alpha2(t));
    if (ss) {
      out << ',' << format_double(draws.q(t));
      for (Eigen::Index k = 0; k < draws.beta.cols(); ++k) out << ',' << draws.gamma(t, k);
    }
    out << '\n';
  }
}

/// labels name the rows (index column values); row numbers are used when empty.
inline ordered_json outlier_report_json(const OutlierReport& r, const std::vector<std::string>& labels) {
  ordered_json j;
  j["threshold"] = r.threshold;
  j["q1"] = r.q1;
  j["q3"] = r.q3;
  ordered_json flagged = ordered_json::array();
  for (Eigen::Index i : r.flagged) {
    flagged.push_back(labels.empty() ? ordered_json(i) : ordered_json(labels[static_cast<std::size_t>(i)]));
  }
  j["n_flagged"] = r.flagged.size();
  j["flagged"] = std::move(flagged);
  j["lambda_upper_percentile"] = std::vector<double>(r.s.data(), r.s.data() + r.s.size());
  return j;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sphreg::io
