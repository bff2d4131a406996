#pragma once

// Command-line front end: fit, simulate, bench, diagnose, forecast.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphreg/chain.hpp"
#include "sphreg/diagnostics.hpp"
#include "sphreg/io/bench.hpp"
#include "sphreg/io/config.hpp"
#include "sphreg/io/csv.hpp"
#include "sphreg/io/forecast.hpp"
#include "sphreg/io/output.hpp"
#include "sphreg/synthetic.hpp"
#include "sphreg/version.hpp"

namespace sphreg::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CliOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string output_dir = ".";
  std::string config_path;
  std::vector<std::string> overrides;  // key=value

  // fit, diagnose, forecast
  std::string data;
  std::string response;
  std::string index;
  bool write_draws = false;
  bool no_refit = false;

  // simulate
  std::string setting;
  int replicate = 0;
  std::string design;

  // bench
  std::string models;
  std::size_t max_tasks = 0;

  // forecast
  bool filter = false;
  std::string baseline;
};

inline std::vector<LossKind> parse_model_list(const std::string& s) {
  std::vector<LossKind> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_loss_kind(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("empty model list");
  return out;
}

inline std::string join_models(const std::vector<LossKind>& models) {
  std::string s;
  for (LossKind m : models) s += (s.empty() ? "" : ",") + std::string(to_string(m));
  return s;
}

/// Config file (if any) with command-line values layered on top.
inline Config load_config(const CliOptions& o) {
  Config c = o.config_path.empty() ? Config{} : Config::parse_file(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (!o.data.empty()) c.set("data.path", o.data);
  if (!o.response.empty()) c.set("data.response", o.response);
  if (!o.index.empty()) c.set("data.index", o.index);
  return c;
}

inline std::filesystem::path out_path(const CliOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.output_dir);
  return std::filesystem::path(o.output_dir) / name;
}

struct DataSource {
  std::string path;
  std::string response;
  std::string index;

  LoadedData load() const { return load_dataset(path, response, index); }
};

inline DataSource read_data_source(Config& c) {
  if (!c.has("data.path")) throw ConfigError("no input data; pass --data");
  if (!c.has("data.response")) throw ConfigError("no response column; pass --response");
  return {c.get_string("data.path", ""), c.get_string("data.response", ""), c.get_string("data.index", "")};
}

inline int cmd_fit(const CliOptions& o, std::ostream& out) {
  Config c = load_config(o);
  const ModelSpec spec = read_model_spec(c);
  McmcConfig cfg = read_mcmc(c);
  const double level = c.get_double("output.level", 0.9);
  if (o.write_draws) c.set("output.draws", "true");
  const bool draws_csv = c.get_bool("output.draws", false);
  const DataSource src = read_data_source(c);
  c.reject_unknown();
  const LoadedData in = src.load();
  cfg.seed = o.seed;
  cfg.record_lambda = false;
  RngStream rng(o.seed, 0);
  const PosteriorDraws draws = run_chain(in.data, spec, cfg, rng);
  ordered_json j = provenance(o.seed, c.spec_hash());
  j["n"] = in.data.n();
  j["p"] = in.data.p();
  j["posterior"] = posterior_summary(draws, in.data.names, level);
  write_json_file(out_path(o, "summary.json").string(), j);
  if (draws_csv) {
    std::ofstream f(out_path(o, "draws.csv"));
    write_draws_csv(f, draws, in.data.names);
  }
  out << "wrote " << out_path(o, "summary.json").string() << '\n';
  return kExitOk;
}

inline int cmd_simulate(const CliOptions& o, std::ostream& out) {
  Config c = load_config(o);
  SimulatedData sim;
  ordered_json j = provenance(o.seed, "");
  if (o.design == "contamination") {
    const std::int64_t n = c.get_int("design.n", 500);
    const double frac = c.get_double("design.contamination", 0.1);
    c.reject_unknown();
    if (n < 1) throw ConfigError("design.n must be positive");
    if (!(frac > 0.0 && frac < 1.0)) throw ConfigError("design.contamination must be in (0, 1)");
    RngStream rng = bench_data_stream(o.seed, "contamination", o.replicate);
    sim = generate_contamination_design(n, frac, rng);
    j["design"] = "contamination";
  } else if (o.design.empty()) {
    std::vector<std::string> ids = c.children("setting.");
    std::string id = o.setting;
    if (id.empty()) {
      if (ids.size() > 1) throw ConfigError("several settings in config; choose one with --setting");
      id = ids.empty() ? "default" : ids.front();
    }
    const BenchSetting s = read_setting(c, id);
    c.reject_unknown();
    RngStream rng = bench_data_stream(o.seed, s.sim.id, o.replicate);
    sim = generate_dataset(s.sim, rng);
    j["setting"] = s.sim.id;
  } else {
    throw ConfigError("unknown design '" + o.design + "' (expected contamination)");
  }
  j["spec_hash"] = c.spec_hash();
  j["replicate"] = o.replicate;
  j["n"] = sim.data.n();
  j["p"] = sim.data.p();
  j["beta_true"] = std::vector<double>(sim.beta_true.data(), sim.beta_true.data() + sim.beta_true.size());
  {
    std::ofstream f(out_path(o, "data.csv"));
    write_dataset_csv(f, sim.data);
  }
  {
    std::ofstream f(out_path(o, "labels.csv"));
    f << "row,contaminated\n";
    for (Eigen::Index i = 0; i < sim.contaminated.size(); ++i) f << i << ',' << sim.contaminated(i) << '\n';
  }
  write_json_file(out_path(o, "simulate.json").string(), j);
  out << "wrote " << out_path(o, "data.csv").string() << '\n';
  return kExitOk;
}

inline int cmd_bench(const CliOptions& o, std::ostream& out, std::ostream& err) {
  if (!o.seed_given) throw ConfigError("bench requires --seed");
  Config c = load_config(o);
  BenchPlan plan;
  plan.base = read_model_spec(c);
  plan.mcmc = read_mcmc(c);
  if (!o.models.empty()) c.set("bench.models", o.models);
  plan.models = parse_model_list(c.get_string("bench.models", "sph,l1,l2"));
  plan.replicates = static_cast<int>(c.get_int("bench.replicates", 20));
  plan.level = c.get_double("bench.level", 0.9);
  plan.settings = read_settings(c);
  c.reject_unknown();
  plan.seed = o.seed;
  plan.threads = o.threads;
  plan.max_tasks = o.max_tasks;
  const BenchResult r = run_bench(plan, o.output_dir, err);
  ordered_json j = provenance(o.seed, c.spec_hash());
  j["models"] = join_models(plan.models);
  j["replicates"] = plan.replicates;
  j["tasks_total"] = r.tasks_total;
  j["tasks_skipped"] = r.tasks_skipped;
  j["tasks_run"] = r.tasks_run;
  j["tasks_failed"] = r.tasks_failed;
  j["complete"] = r.complete;
  write_json_file(out_path(o, "bench.json").string(), j);
  out << "bench: " << r.tasks_run << " tasks run, " << r.tasks_skipped << " already done, " << r.tasks_failed
      << " failed" << (r.complete ? "" : " (incomplete, rerun to resume)") << '\n';
  return kExitOk;
}

inline int cmd_diagnose(const CliOptions& o, std::ostream& out) {
  Config c = load_config(o);
  const ModelSpec spec = read_model_spec(c);
  McmcConfig cfg = read_mcmc(c);
  const double prob = c.get_double("diagnose.percentile", 0.95);
  if (o.no_refit) c.set("diagnose.refit", "false");
  const bool refit = c.get_bool("diagnose.refit", true);
  const double level = c.get_double("output.level", 0.9);
  const DataSource src = read_data_source(c);
  c.reject_unknown();
  if (!(prob > 0.0 && prob < 1.0)) throw ConfigError("diagnose.percentile must be in (0, 1)");
  if (spec.loss() == LossKind::L2) {
    throw UnsupportedOperation(
        "L2 model lacks an outlier-filtered refit version as it does not include the lambda_i parameters");
  }
  const LoadedData in = src.load();
  cfg.seed = o.seed;
  RngStream rng(o.seed, 0);
  ordered_json j = provenance(o.seed, c.spec_hash());
  j["n"] = in.data.n();
  if (refit) {
    const FilterRefitResult r = filter_and_refit(in.data, spec, cfg, rng, prob);
    j["report"] = outlier_report_json(r.report, in.index);
    j["original"] = posterior_summary(r.initial, in.data.names, level);
    j["refit"] = posterior_summary(r.refit, in.data.names, level);
    j["n_refit"] = r.filtered.n();
    out << "flagged " << r.report.flagged.size() << " of " << in.data.n() << " observations\n";
  } else {
    cfg.record_lambda = true;
    const PosteriorDraws draws = run_chain(in.data, spec, cfg, rng);
    const OutlierReport rep = tukey_flag(lambda_percentiles(draws, prob));
    j["report"] = outlier_report_json(rep, in.index);
    j["original"] = posterior_summary(draws, in.data.names, level);
    out << "flagged " << rep.flagged.size() << " of " << in.data.n() << " observations\n";
  }
  write_json_file(out_path(o, "outlier_report.json").string(), j);
  return kExitOk;
}

inline int cmd_forecast(const CliOptions& o, std::ostream& out, std::ostream& err) {
  Config c = load_config(o);
  ForecastOptions opt;
  opt.base = read_model_spec(c);
  opt.mcmc = read_mcmc(c);
  RollingWindowPlan plan;
  plan.window = c.get_int("forecast.window", 0);
  plan.n_origins = c.get_int("forecast.origins", 1);
  if (!o.models.empty()) c.set("forecast.models", o.models);
  if (!o.baseline.empty()) c.set("forecast.baseline", o.baseline);
  if (o.filter) c.set("forecast.filter", "true");
  opt.models = parse_model_list(c.get_string("forecast.models", "sph"));
  const std::string base = c.get_string("forecast.baseline", std::string(to_string(opt.models.front())));
  opt.baseline = parse_model_list(base).front();
  opt.filtered_refit = c.get_bool("forecast.filter", false);
  const DataSource src = read_data_source(c);
  c.reject_unknown();
  const LoadedData in = src.load();
  opt.seed = o.seed;
  opt.mcmc.seed = o.seed;
  const std::vector<ForecastRow> rows = run_forecast(in, plan, opt, &err);
  {
    std::ofstream f(out_path(o, "forecast.csv"));
    write_forecast_csv(f, rows);
  }
  ordered_json j = provenance(o.seed, c.spec_hash());
  j["window"] = plan.window;
  j["origins"] = plan.n_origins;
  j["baseline"] = std::string(to_string(opt.baseline));
  ordered_json summary = ordered_json::array();
  std::map<std::pair<std::string, std::string>, std::pair<double, double>> sums;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.model, r.variant);
    if (!sums.count(key)) order.push_back(key);
    sums[key].first += r.prediction_mse;
    sums[key].second += r.relative_mse;
  }
  for (const auto& key : order) {
    ordered_json e;
    e["model"] = key.first;
    e["variant"] = key.second;
    e["mean_prediction_mse"] = sums[key].first / static_cast<double>(plan.n_origins);
    e["mean_relative_mse"] = sums[key].second / static_cast<double>(plan.n_origins);
    summary.push_back(std::move(e));
  }
  j["summary"] = std::move(summary);
  write_json_file(out_path(o, "forecast.json").string(), j);
  out << "wrote " << out_path(o, "forecast.csv").string() << '\n';
  return kExitOk;
}

/// Parses argv and runs one subcommand.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Bayesian regression under the scaled pseudo-Huber loss", "sphreg"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  CliOptions o;
  auto* seed = app.add_option("--seed", o.seed, "RNG seed")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", o.threads, "worker threads for bench")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", o.output_dir, "directory for output files");
  app.add_option("--config", o.config_path, "config file (key = value, [section] prefixes)")->check(CLI::ExistingFile);
  app.add_option("--set", o.overrides, "override a config key, key=value");

  auto data_opts = [&](CLI::App* s) {
    s->add_option("--data", o.data, "input CSV");
    s->add_option("--response", o.response, "response column");
    s->add_option("--index", o.index, "index column excluded from predictors");
  };
  CLI::App* fit = app.add_subcommand("fit", "fit a model and write a posterior summary");
  data_opts(fit);
  fit->add_flag("--draws", o.write_draws, "also write draws.csv");

  CLI::App* simulate = app.add_subcommand("simulate", "generate a simulated dataset");
  simulate->add_option("--setting", o.setting, "setting id from the config");
  simulate->add_option("--replicate", o.replicate, "replicate number")->check(CLI::NonNegativeNumber);
  simulate->add_option("--design", o.design, "named design: contamination");

  CLI::App* bench = app.add_subcommand("bench", "run the simulation benchmark");
  bench->add_option("--models", o.models, "comma-separated losses, e.g. sph,l1,l2");
  bench->add_option("--max-tasks", o.max_tasks, "stop after this many new tasks");

  CLI::App* diagnose = app.add_subcommand("diagnose", "flag outliers by lambda percentiles and refit");
  data_opts(diagnose);
  diagnose->add_flag("--no-refit", o.no_refit, "only flag, do not refit");

  CLI::App* forecast = app.add_subcommand("forecast", "rolling-window one-step forecasts");
  data_opts(forecast);
  forecast->add_option("--models", o.models, "comma-separated losses");
  forecast->add_option("--baseline", o.baseline, "model whose MSE scales the relative MSE");
  forecast->add_flag("--filter", o.filter, "add outlier-filtered refits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "sphreg: " << e.what() << '\n';
    return kExitUsage;
  }
  o.seed_given = seed->count() > 0;

  try {
    if (fit->parsed()) return cmd_fit(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (bench->parsed()) return cmd_bench(o, out, err);
    if (diagnose->parsed()) return cmd_diagnose(o, out);
    if (forecast->parsed()) return cmd_forecast(o, out, err);
  } catch (const ConfigError& e) {
    err << "sphreg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingColumnError& e) {
    err << "sphreg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedOperation& e) {
    err << "sphreg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sphreg: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace sphreg::io
