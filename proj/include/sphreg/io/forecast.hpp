#pragma once

// Rolling-window one-step forecasts: for each origin fit on the trailing
// window, predict the next row from its predictors, and score the predictive
// draws against the realized response.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphreg/chain.hpp"
#include "sphreg/diagnostics.hpp"
#include "sphreg/io/config.hpp"
#include "sphreg/io/csv.hpp"
#include "sphreg/metrics.hpp"
#include "sphreg/rng.hpp"

namespace sphreg::io {

/// The last n_origins rows are forecast targets; each is predicted from a fit
/// on the window rows immediately before it, so consecutive windows shift by one.
struct RollingWindowPlan {
  Eigen::Index window = 0;
  Eigen::Index n_origins = 1;

  void validate(Eigen::Index n_rows) const {
    if (window < 1) throw ConfigError("forecast: window must be at least 1");
    if (n_origins < 1) throw ConfigError("forecast: origins must be at least 1");
    if (window + n_origins > n_rows) {
      throw ConfigError("forecast: window of " + std::to_string(window) + " with " + std::to_string(n_origins) +
                        " origins needs " + std::to_string(window + n_origins) + " rows, data has " +
                        std::to_string(n_rows));
    }
  }

  Eigen::Index target(Eigen::Index n_rows, Eigen::Index k) const { return n_rows - n_origins + k; }
  Eigen::Index window_start(Eigen::Index n_rows, Eigen::Index k) const { return target(n_rows, k) - window; }
};

struct ForecastOptions {
  std::vector<LossKind> models{LossKind::SPH};
  LossKind baseline = LossKind::SPH;
  bool filtered_refit = false;
  ModelSpec base;
  McmcConfig mcmc;
  std::uint64_t seed = 0;
};

struct ForecastRow {
  Eigen::Index origin = 0;
  std::string target;
  std::string window_start;
  std::string window_end;
  std::string model;
  std::string variant;  // "original" or "filtered"
  double prediction_mean = 0.0;
  double realized = 0.0;
  double prediction_mse = 0.0;
  double relative_mse = 0.0;
};

inline Dataset slice_rows(const Dataset& d, Eigen::Index start, Eigen::Index count) {
  Dataset out;
  out.y = d.y.segment(start, count);
  out.X = d.X.middleRows(start, count);
  out.names = d.names;
  return out;
}

inline std::vector<ForecastRow> run_forecast(const LoadedData& in, const RollingWindowPlan& plan,
                                             const ForecastOptions& opt, std::ostream* log = nullptr) {
  const Dataset& d = in.data;
  d.validate();
  plan.validate(d.n());
  bool has_baseline = false;
  for (LossKind m : opt.models) has_baseline = has_baseline || m == opt.baseline;
  if (!has_baseline) throw ConfigError("forecast: baseline model must be one of the fitted models");

  auto label = [&](Eigen::Index i) { return in.index.empty() ? std::to_string(i) : in.index[static_cast<std::size_t>(i)]; };
  std::vector<ForecastRow> rows;
  for (Eigen::Index k = 0; k < plan.n_origins; ++k) {
    const Eigen::Index t = plan.target(d.n(), k);
    const Eigen::Index s = plan.window_start(d.n(), k);
    const Dataset train = slice_rows(d, s, plan.window);
    const Dataset test = slice_rows(d, t, 1);
    const std::size_t first = rows.size();
    double base_mse = 0.0;
    for (LossKind m : opt.models) {
      const std::string mname(to_string(m));
      const ModelSpec spec = with_loss(opt.base, m);
      RngStream rng(opt.seed, derive_stream_id({static_cast<std::uint64_t>(k), fnv1a(mname)}));
      auto emit = [&](const PosteriorDraws& draws, const std::string& variant) {
        ForecastRow r;
        r.origin = k;
        r.target = label(t);
        r.window_start = label(s);
        r.window_end = label(t - 1);
        r.model = mname;
        r.variant = variant;
        r.prediction_mean = draws.mu.mean() + (draws.beta * test.X.row(0).transpose()).mean();
        r.realized = test.y(0);
        r.prediction_mse = prediction_mse(draws, test)(0);
        if (m == opt.baseline && variant == "original") base_mse = r.prediction_mse;
        rows.push_back(std::move(r));
      };
      if (opt.filtered_refit && m != LossKind::L2) {
        McmcConfig cfg = opt.mcmc;
        const FilterRefitResult fr = filter_and_refit(train, spec, cfg, rng);
        emit(fr.initial, "original");
        emit(fr.refit, "filtered");
      } else {
        McmcConfig cfg = opt.mcmc;
        cfg.record_lambda = false;
        emit(run_chain(train, spec, cfg, rng), "original");
        if (opt.filtered_refit && log && k == 0) *log << "forecast: l2 has no filtered refit, rows are original only\n";
      }
    }
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].relative_mse = rows[i].prediction_mse / base_mse;
  }
  return rows;
}

inline void write_forecast_csv(std::ostream& out, const std::vector<ForecastRow>& rows) {
  out << "origin,target,window_start,window_end,model,variant,prediction_mean,realized,prediction_mse,relative_mse\n";
  for (const auto& r : rows) {
    out << r.origin << ',' << csv_escape(r.target) << ',' << csv_escape(r.window_start) << ',' << csv_escape(r.window_end) << ',' << r.model << ','
        << r.variant << ',' << format_double(r.prediction_mean) << ',' << format_double(r.realized) << ','
        << format_double(r.prediction_mse) << ',' << format_double(r.relative_mse) << '\n';
  }
}

}  // namespace sphreg::io
