#pragma once

// Simulation benchmark: for every (setting, replicate, model) generate a
// training and an independent test set, fit, and record per-replicate metrics
// in replicates.csv. A task is done once its "completed" or "failed" marker row
// is written, so an interrupted run resumes where it stopped. metrics.csv is
// aggregated from replicates.csv in a fixed order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sphreg/chain.hpp"
#include "sphreg/io/config.hpp"
#include "sphreg/io/csv.hpp"
#include "sphreg/metrics.hpp"
#include "sphreg/rng.hpp"
#include "sphreg/synthetic.hpp"

namespace sphreg::io {

struct BenchPlan {
  std::vector<BenchSetting> settings;
  std::vector<LossKind> models;
  int replicates = 20;
  ModelSpec base;
  McmcConfig mcmc;
  std::uint64_t seed = 0;
  double level = 0.9;
  int threads = 1;
  std::size_t max_tasks = 0;  // stop after this many new tasks; 0 runs everything

  void validate() const {
    if (settings.empty()) throw ConfigError("bench: no settings");
    if (models.empty()) throw ConfigError("bench: no models");
    if (replicates < 1) throw ConfigError("bench: replicates must be at least 1");
    if (threads < 1) throw ConfigError("bench: threads must be at least 1");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("bench: level must be in (0, 1)");
    for (LossKind m : models) {
      if (m == LossKind::Huber) throw ConfigError("bench: huber loss has no sampler");
    }
    std::set<std::string> ids;
    for (const auto& s : settings) {
      if (!ids.insert(s.sim.id).second) throw ConfigError("bench: duplicate setting id " + s.sim.id);
      if (s.sim.id.find(',') != std::string::npos) throw ConfigError("bench: setting id may not contain ','");
    }
  }
};

struct ReplicateRow {
  std::string setting;
  int replicate = 0;
  std::string model;
  std::string metric;
  std::string coordinate;
  double value = 0.0;
};

struct MetricRow {
  std::string setting;
  std::string model;
  std::string metric;
  std::string coordinate;
  double value = 0.0;
};

/// Working-likelihood variance for the sandwich interval; none for other losses.
inline std::optional<double> sandwich_sigma2(LossKind k) {
  if (k == LossKind::L1) return 0.5;
  if (k == LossKind::SPH) return 1.0;
  return std::nullopt;
}

inline RngStream bench_data_stream(std::uint64_t seed, const std::string& setting, int replicate) {
  return RngStream(seed, derive_stream_id({fnv1a(setting), static_cast<std::uint64_t>(replicate), 0}));
}

inline RngStream bench_fit_stream(std::uint64_t seed, const std::string& setting, int replicate, LossKind model) {
  return RngStream(seed, derive_stream_id({fnv1a(setting), static_cast<std::uint64_t>(replicate), 1,
                                           fnv1a(std::string(to_string(model)))}));
}

/// Fits one model on one replicate and returns its metric rows (without the marker).
inline std::vector<ReplicateRow> run_bench_task(const BenchPlan& plan, const BenchSetting& setting, int replicate,
                                                LossKind model) {
  RngStream data_rng = bench_data_stream(plan.seed, setting.sim.id, replicate);
  const SimulatedData train = generate_dataset(setting.sim, data_rng);
  const SimulatedData test = generate_dataset(setting.sim, data_rng);

  ModelSpec spec = with_loss(plan.base, model);
  spec.prior = setting.prior;
  McmcConfig cfg = plan.mcmc;
  cfg.record_lambda = false;
  RngStream fit_rng = bench_fit_stream(plan.seed, setting.sim.id, replicate, model);
  const PosteriorDraws draws = run_chain(train.data, spec, cfg, fit_rng);

  const std::string mname(to_string(model));
  std::vector<ReplicateRow> rows;
  auto add = [&](const std::string& metric, const std::string& coord, double v) {
    rows.push_back({setting.sim.id, replicate, mname, metric, coord, v});
  };
  const Eigen::Index p = setting.sim.p;
  const Eigen::VectorXd pmse = posterior_mse(draws, train.beta_true);
  for (Eigen::Index j = 0; j < p; ++j) add("posterior_mse", train.data.names[static_cast<std::size_t>(j)], pmse(j));
  const Eigen::VectorXd pred = prediction_mse(draws, test.data);
  for (Eigen::Index i = 0; i < pred.size(); ++i) add("prediction_mse_obs", std::to_string(i + 1), pred(i));
  for (Eigen::Index j = 0; j < p; ++j) {
    const IntervalEstimate ci = credible_interval(draws, j, plan.level);
    const std::string& name = train.data.names[static_cast<std::size_t>(j)];
    add("coverage_equi", name, ci.covers(train.beta_true(j)) ? 1.0 : 0.0);
    add("length_equi", name, ci.length());
  }
  const auto s2 = sandwich_sigma2(model);
  if (s2 && setting.prior == PriorKind::Ridge) {
    const Eigen::MatrixXd v = sandwich_cov(draws, train.data, *s2);
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * plan.level);
    const Eigen::VectorXd mean = draws.beta_mean();
    for (Eigen::Index j = 0; j < p; ++j) {
      const double half = z * std::sqrt(std::max(0.0, v(j, j)));
      const IntervalEstimate ci{mean(j) - half, mean(j) + half, plan.level, IntervalMethod::SandwichNormal};
      const std::string& name = train.data.names[static_cast<std::size_t>(j)];
      add("coverage_sandwich", name, ci.covers(train.beta_true(j)) ? 1.0 : 0.0);
      add("length_sandwich", name, ci.length());
    }
  }
  if (setting.prior == PriorKind::SpikeSlab) {
    Eigen::VectorXi truth(p);
    for (Eigen::Index j = 0; j < p; ++j) truth(j) = train.beta_true(j) != 0.0 ? 1 : 0;
    add("mcc", "all", mcc(median_probability_model(draws), truth));
  }
  return rows;
}

inline const char* kReplicateHeader = "setting_id,replicate,model,metric,coordinate,value";

inline void write_replicate_row(std::ostream& out, const ReplicateRow& r) {
  out << r.setting << ',' << r.replicate << ',' << r.model << ',' << r.metric << ',' << r.coordinate << ','
      << format_double(r.value) << '\n';
}

inline std::vector<ReplicateRow> read_replicate_rows(const std::string& path) {
  std::vector<ReplicateRow> rows;
  if (!std::filesystem::exists(path)) return rows;
  const CsvTable t = read_csv_file(path);
  if (t.header.size() != 6 || t.header[0] != "setting_id") throw CsvError(path + ": not a replicates file");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    ReplicateRow r;
    r.setting = f[0];
    r.replicate = static_cast<int>(parse_double(f[1], path));
    r.model = f[2];
    r.metric = f[3];
    r.coordinate = f[4];
    r.value = f[5] == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_double(f[5], path);
    rows.push_back(std::move(r));
  }
  return rows;
}

using TaskKey = std::tuple<std::string, int, std::string>;

inline bool is_marker(const std::string& metric) { return metric == "completed" || metric == "failed"; }

/// Drops rows of tasks that never reached their marker.
inline std::vector<ReplicateRow> finished_rows(const std::vector<ReplicateRow>& rows, std::set<TaskKey>& done) {
  done.clear();
  for (const auto& r : rows) {
    if (is_marker(r.metric)) done.insert({r.setting, r.replicate, r.model});
  }
  std::vector<ReplicateRow> kept;
  for (const auto& r : rows) {
    if (done.count({r.setting, r.replicate, r.model})) kept.push_back(r);
  }
  return kept;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Aggregates finished replicate rows in setting, model, metric, coordinate order.
inline std::vector<MetricRow> aggregate(const BenchPlan& plan, const std::vector<ReplicateRow>& rows) {
  // (setting, model, metric, coordinate) -> replicate -> value
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::map<int, double>> cells;
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> counts;  // completed, failed
  for (const auto& r : rows) {
    if (r.metric == "completed") ++counts[{r.setting, r.model}].first;
    else if (r.metric == "failed") ++counts[{r.setting, r.model}].second;
    else cells[{r.setting, r.model, r.metric, r.coordinate}][r.replicate] = r.value;
  }
  auto values = [&](const std::string& s, const std::string& m, const std::string& metric, const std::string& c) {
    std::vector<double> v;
    const auto it = cells.find({s, m, metric, c});
    if (it != cells.end()) {
      for (const auto& [rep, x] : it->second) v.push_back(x);
    }
    return v;
  };

  std::vector<MetricRow> out;
  for (const auto& setting : plan.settings) {
    const std::string& sid = setting.sim.id;
    const Eigen::VectorXd truth = beta_true(setting.sim);
    const std::vector<std::string> names = default_names(setting.sim.p);
    for (LossKind model : plan.models) {
      const std::string m(to_string(model));
      const auto [n_done, n_failed] = counts[{sid, m}];
      out.push_back({sid, m, "replicates_completed", "all", static_cast<double>(n_done)});
      out.push_back({sid, m, "replicates_failed", "all", static_cast<double>(n_failed)});
      if (n_done == 0) continue;

      std::vector<double> signal;
      for (std::size_t j = 0; j < names.size(); ++j) {
        const auto v = values(sid, m, "posterior_mse", names[j]);
        if (v.empty()) continue;
        const double med = median(v);
        out.push_back({sid, m, "posterior_mse", names[j], med});
        if (truth(static_cast<Eigen::Index>(j)) != 0.0) signal.push_back(med);
      }
      if (!signal.empty()) out.push_back({sid, m, "posterior_mse", "signal_median", median(signal)});

      std::vector<double> per_obs;
      for (Eigen::Index i = 0; i < setting.sim.n; ++i) {
        const auto v = values(sid, m, "prediction_mse_obs", std::to_string(i + 1));
        if (!v.empty()) per_obs.push_back(median(v));
      }
      if (!per_obs.empty()) out.push_back({sid, m, "prediction_mse", "median_of_medians", median(per_obs)});

      for (const char* metric : {"coverage_equi", "length_equi", "coverage_sandwich", "length_sandwich"}) {
        std::vector<double> per_coord;
        for (const auto& name : names) {
          const auto v = values(sid, m, metric, name);
          if (v.empty()) continue;
          const double mean = mean_of(v);
          out.push_back({sid, m, metric, name, mean});
          per_coord.push_back(mean);
        }
        if (!per_coord.empty()) out.push_back({sid, m, metric, "median", median(per_coord)});
      }

      const auto mccs = values(sid, m, "mcc", "all");
      if (!mccs.empty()) out.push_back({sid, m, "mcc", "median", median(mccs)});
    }
  }
  return out;
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "setting_id,model,metric,coordinate,value\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.model << ',' << r.metric << ',' << r.coordinate << ',' << format_double(r.value)
        << '\n';
  }
}

struct BenchResult {
  std::size_t tasks_total = 0;
  std::size_t tasks_skipped = 0;  // already finished before this run
  std::size_t tasks_run = 0;
  std::size_t tasks_failed = 0;
  bool complete = false;
  std::vector<MetricRow> metrics;
};

/// Runs the unfinished tasks of plan in out_dir and rewrites metrics.csv.
inline BenchResult run_bench(const BenchPlan& plan, const std::filesystem::path& out_dir,
                             std::ostream& log = std::cerr) {
  plan.validate();
  std::filesystem::create_directories(out_dir);
  const std::string rep_path = (out_dir / "replicates.csv").string();

  std::set<TaskKey> done;
  const std::vector<ReplicateRow> kept = finished_rows(read_replicate_rows(rep_path), done);
  {
    std::ofstream out(rep_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + rep_path);
    out << kReplicateHeader << '\n';
    for (const auto& r : kept) write_replicate_row(out, r);
  }

  struct Task {
    const BenchSetting* setting;
    int replicate;
    LossKind model;
  };
  std::vector<Task> todo;
  BenchResult result;
  for (const auto& s : plan.settings) {
    for (int r = 0; r < plan.replicates; ++r) {
      for (LossKind m : plan.models) {
        ++result.tasks_total;
        if (done.count({s.sim.id, r, std::string(to_string(m))})) {
          ++result.tasks_skipped;
          continue;
        }
        todo.push_back({&s, r, m});
      }
    }
  }
  if (plan.max_tasks > 0 && todo.size() > plan.max_tasks) todo.resize(plan.max_tasks);

  std::ofstream rep(rep_path, std::ios::app);
  std::mutex collector;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const Task& t = todo[k];
      const std::string mname(to_string(t.model));
      std::vector<ReplicateRow> rows;
      std::string error;
      try {
        rows = run_bench_task(plan, *t.setting, t.replicate, t.model);
        rows.push_back({t.setting->sim.id, t.replicate, mname, "completed", "all", 1.0});
      } catch (const std::exception& e) {
        error = e.what();
        rows = {{t.setting->sim.id, t.replicate, mname, "failed", "all", 1.0}};
      }
      std::lock_guard<std::mutex> lock(collector);
      if (!error.empty()) {
        ++result.tasks_failed;
        log << "bench: setting " << t.setting->sim.id << " replicate " << t.replicate << " model " << mname
            << " failed: " << error << '\n';
      }
      for (const auto& r : rows) write_replicate_row(rep, r);
      rep.flush();
      ++result.tasks_run;
    }
  };
  const int n_threads = std::max(1, std::min<int>(plan.threads, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  rep.close();

  result.complete = result.tasks_skipped + result.tasks_run == result.tasks_total;
  result.metrics = aggregate(plan, finished_rows(read_replicate_rows(rep_path), done));
  std::ofstream met(out_dir / "metrics.csv", std::ios::trunc);
  if (!met) throw std::runtime_error("cannot write metrics.csv in " + out_dir.string());
  write_metrics_csv(met, result.metrics);
  return result;
}

/// First value for (setting, model, metric, coordinate), or NaN.
inline double find_metric(const std::vector<MetricRow>& rows, const std::string& setting, const std::string& model,
                          const std::string& metric, const std::string& coordinate) {
  for (const auto& r : rows) {
    if (r.setting == setting && r.model == model && r.metric == metric && r.coordinate == coordinate) return r.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace sphreg::io
