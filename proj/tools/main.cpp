// Command-line front end: simulation studies, one-off fits, rolling quantile
// forecasts, density evaluation, and a synthetic panel generator. Every
// command writes its outputs plus a manifest.json into --out and is
// deterministic for a fixed --seed. Exit codes: 0 ok, 1 runtime failure,
// 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsbqr/density.hpp"
#include "hsbqr/gar.hpp"
#include "hsbqr/io.hpp"
#include "hsbqr/mc_lab.hpp"
#include "hsbqr/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kFitTag = 0x46495420;  // "FIT "

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  for (const std::string& cell : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("bad quantile level '" + cell + "'");
    }
  }
  if (out.empty()) throw UsageError("empty quantile list");
  std::sort(out.begin(), out.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0 && out[i] < 1.0))
      throw UsageError("quantile levels must lie strictly inside (0, 1)");
    if (i > 0 && out[i] == out[i - 1]) throw UsageError("duplicate quantile level");
  }
  return out;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " path is required");
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw UsageError("--out directory is required");
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                    const json& config, std::vector<std::string> outputs) {
  json m;
  m["command"] = command;
  m["version"] = hsbqr::kVersion;
  m["seed"] = seed;
  m["config"] = config;
  outputs.emplace_back("manifest.json");
  std::sort(outputs.begin(), outputs.end());
  m["outputs"] = outputs;
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << m.dump(2) << '\n';
}

hsbqr::SamplerConfig make_sampler(const std::string& prior, const std::string& backend,
                                  int iters, int burn) {
  hsbqr::SamplerConfig cfg;
  try {
    cfg.prior = hsbqr::parse_prior_kind(prior);
    cfg.backend = hsbqr::parse_beta_backend(backend);
    cfg.n_iter = iters;
    cfg.n_burn = burn;
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// Forecasting frame: the target column mapped to growth (or used as-is),
// with every other panel column plus the target series itself as regressors
// dated the same quarter. With the growth modes the first panel row is
// consumed by differencing, so row t of the frame is quarter t+1.
struct Frame {
  hsbqr::Matrix x;
  hsbqr::Vector y;
  std::vector<std::string> dates;
};

Frame build_frame(const hsbqr::MacroPanel& panel, const std::string& target,
                  const std::string& growth_mode) {
  const Eigen::Index ti = panel.column(target);
  if (ti < 0) throw std::runtime_error("target column vanished: " + target);
  std::vector<Eigen::Index> others;
  for (Eigen::Index j = 0; j < panel.cols(); ++j)
    if (j != ti) others.push_back(j);

  Frame f;
  if (growth_mode == "none") {
    f.y = panel.values.col(ti);
    f.x.resize(panel.rows(), static_cast<Eigen::Index>(others.size()) + 1);
    for (std::size_t j = 0; j < others.size(); ++j)
      f.x.col(static_cast<Eigen::Index>(j)) = panel.values.col(others[j]);
    f.x.col(f.x.cols() - 1) = f.y;
    f.dates = panel.dates;
    return f;
  }

  hsbqr::GrowthMode mode;
  if (growth_mode == "log")
    mode = hsbqr::GrowthMode::log_annualized;
  else if (growth_mode == "simple")
    mode = hsbqr::GrowthMode::simple_annualized;
  else
    throw UsageError("unknown growth mode: " + growth_mode + " (log|simple|none)");

  f.y = hsbqr::growth_transform(panel.values.col(ti), mode);
  const Eigen::Index t = f.y.size();
  f.x.resize(t, static_cast<Eigen::Index>(others.size()) + 1);
  for (std::size_t j = 0; j < others.size(); ++j)
    f.x.col(static_cast<Eigen::Index>(j)) = panel.values.col(others[j]).tail(t);
  f.x.col(f.x.cols() - 1) = f.y;
  f.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  return f;
}

// Smoothable forecast rows (finite with positive spread) as plot densities.
void write_densities(const fs::path& path, const hsbqr::QuantileForecastSet& fc,
                     const std::vector<std::string>& origin_dates) {
  std::vector<hsbqr::ForecastDensity> densities;
  std::vector<std::string> dates;
  for (Eigen::Index i = 0; i < fc.values.rows(); ++i) {
    hsbqr::Vector row = fc.values.row(i).transpose();
    if (!row.allFinite() || !(row.maxCoeff() > row.minCoeff())) continue;
    densities.push_back(hsbqr::smooth_to_density(hsbqr::sort_quantiles(row).values));
    dates.push_back(origin_dates[static_cast<std::size_t>(i)]);
  }
  if (!densities.empty()) hsbqr::write_density_grid_csv(path.string(), densities, dates);
}

struct McOptions {
  std::string design = "sparse";
  std::string error = "y1";
  int train = 100;
  int holdout = 100;
  int t1 = 200;
  int reps = 20;
  double noise = 1.0;
  std::string quantiles = "0.1,0.5,0.9";
  std::string priors = "horseshoe,lasso";
  std::string backend = "auto";
  int iters = 5000;
  int burn = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "mc_out";
};

int run_mc(const McOptions& o) {
  hsbqr::McStudyConfig cfg;
  try {
    cfg.dgp.design = hsbqr::parse_design_kind(o.design);
    cfg.dgp.error = hsbqr::parse_error_model(o.error);
    cfg.dgp.t1 = o.t1;
    cfg.dgp.t_total = o.train + o.holdout;
    cfg.dgp.holdout = o.holdout;
    cfg.dgp.n_replications = o.reps;
    cfg.dgp.noise_scale = o.noise;
    cfg.dgp.seed = o.seed;
    cfg.dgp.validate();
    for (const std::string& name : split_list(o.priors))
      cfg.priors.push_back(hsbqr::parse_prior_kind(name));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.priors.empty()) throw UsageError("no estimators requested");
  cfg.quantiles = parse_levels(o.quantiles);
  cfg.sampler = make_sampler("horseshoe", o.backend, o.iters, o.burn);
  cfg.n_threads = o.threads;

  hsbqr::McResult result = hsbqr::run_mc_study(cfg);

  const fs::path dir = prepare_out_dir(o.out);
  hsbqr::write_mc_tables(dir.string(), result);
  std::vector<std::string> outputs = {"rmcb.csv", "rmsfe.csv", "cells.csv"};
  if (!result.failures.empty()) outputs.emplace_back("failures.log");
  json config = {{"design", o.design},     {"error", o.error},   {"train", o.train},
                 {"holdout", o.holdout},   {"t1", o.t1},         {"reps", o.reps},
                 {"noise", o.noise},       {"quantiles", o.quantiles},
                 {"priors", o.priors},     {"backend", o.backend},
                 {"iters", o.iters},       {"burn", o.burn},     {"seed", o.seed},
                 {"threads", o.threads},   {"out", o.out}};
  write_manifest(dir, "mc", o.seed, config, outputs);

  bool dead_cell = false;
  for (const auto& c : result.cells) dead_cell = dead_cell || c.n_ok == 0;
  std::cout << "mc: " << result.cells.size() << " cells, " << result.failures.size()
            << " failed replications -> " << dir.string() << '\n';
  if (dead_cell) {
    std::cerr << "mc: at least one cell lost every replication\n";
    return 1;
  }
  return 0;
}

struct FitOptions {
  std::string input;
  std::string target = "GDP";
  std::string start_date;
  std::string quantiles = "0.5";
  std::string prior = "horseshoe";
  std::string backend = "auto";
  int iters = 5000;
  int burn = 1000;
  std::uint64_t seed = 1;
  std::string out = "fit_out";
};

int run_fit(const FitOptions& o) {
  require_file(o.input, "input panel");
  const std::vector<double> levels = parse_levels(o.quantiles);
  const hsbqr::SamplerConfig smp = make_sampler(o.prior, o.backend, o.iters, o.burn);

  hsbqr::MacroPanel panel = hsbqr::load_panel(o.input, {o.target, o.start_date});
  const Eigen::Index ti = panel.column(o.target);
  std::vector<Eigen::Index> others;
  std::vector<std::string> terms = {"intercept"};
  for (Eigen::Index j = 0; j < panel.cols(); ++j)
    if (j != ti) {
      others.push_back(j);
      terms.push_back(panel.names[static_cast<std::size_t>(j)]);
    }
  if (others.empty()) throw std::runtime_error("no regressor columns besides the target");
  hsbqr::Matrix x(panel.rows(), static_cast<Eigen::Index>(others.size()));
  for (std::size_t j = 0; j < others.size(); ++j)
    x.col(static_cast<Eigen::Index>(j)) = panel.values.col(others[j]);
  const hsbqr::Vector y = panel.values.col(ti);

  std::vector<hsbqr::StandardizedFit> fits;
  std::vector<hsbqr::PosteriorDraws> draws;
  for (std::size_t qi = 0; qi < levels.size(); ++qi) {
    hsbqr::Rng rng(o.seed, hsbqr::substream(kFitTag, static_cast<std::uint64_t>(qi)));
    fits.push_back(
        hsbqr::fit_with_intercept(rng, x, y, hsbqr::quantile_constants(levels[qi]), smp));
    draws.push_back(fits.back().draws);
  }

  const fs::path dir = prepare_out_dir(o.out);
  {
    std::ofstream table(dir / "fit.csv");
    if (!table) throw std::runtime_error("cannot write " + (dir / "fit.csv").string());
    table << "quantile,term,mean,ci_lower,ci_upper\n";
    for (std::size_t qi = 0; qi < levels.size(); ++qi)
      for (Eigen::Index j = 0; j < fits[qi].coefficients.size(); ++j)
        table << hsbqr::format_full(levels[qi]) << ',' << terms[static_cast<std::size_t>(j)]
              << ',' << hsbqr::format_full(fits[qi].coefficients[j]) << ','
              << hsbqr::format_full(fits[qi].ci_lower[j]) << ','
              << hsbqr::format_full(fits[qi].ci_upper[j]) << '\n';
  }
  hsbqr::write_fit_summaries((dir / "fit_summary.json").string(), draws);
  json config = {{"input", o.input},   {"target", o.target}, {"start_date", o.start_date},
                 {"quantiles", o.quantiles}, {"prior", o.prior}, {"backend", o.backend},
                 {"iters", o.iters},   {"burn", o.burn},     {"seed", o.seed},
                 {"out", o.out}};
  write_manifest(dir, "fit", o.seed, config, {"fit.csv", "fit_summary.json"});
  std::cout << "fit: " << levels.size() << " quantile(s), " << terms.size()
            << " terms -> " << dir.string() << '\n';
  return 0;
}

struct ForecastOptions {
  std::string input;
  std::string target = "GDP";
  std::string start_date;
  std::string growth = "log";
  int h = 1;
  int window = 50;
  bool expanding = false;
  int grid_n = 19;
  std::string quantiles;
  std::string prior = "horseshoe";
  std::string backend = "auto";
  int iters = 5000;
  int burn = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "forecast_out";
};

int run_forecast(const ForecastOptions& o) {
  require_file(o.input, "input panel");
  hsbqr::RollingConfig rcfg;
  rcfg.sampler = make_sampler(o.prior, o.backend, o.iters, o.burn);
  rcfg.seed = o.seed;
  rcfg.n_threads = o.threads;

  hsbqr::MacroPanel panel = hsbqr::load_panel(o.input, {o.target, o.start_date});
  Frame frame = build_frame(panel, o.target, o.growth);

  hsbqr::RollingPlan plan;
  hsbqr::QuantileGrid grid = hsbqr::QuantileGrid::equidistant(19);
  try {
    grid = o.quantiles.empty() ? hsbqr::QuantileGrid::equidistant(o.grid_n)
                               : hsbqr::QuantileGrid(parse_levels(o.quantiles));
    plan = hsbqr::RollingPlan::make(frame.y.size(), o.window, o.h, o.expanding);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  hsbqr::QuantileForecastSet fc = hsbqr::rolling_forecast(frame.x, frame.y, plan, grid, rcfg);
  std::vector<std::string> origin_dates;
  for (int origin : fc.origins)
    origin_dates.push_back(frame.dates[static_cast<std::size_t>(origin)]);
  const hsbqr::Vector realized = hsbqr::realized_targets(fc, frame.y);

  const fs::path dir = prepare_out_dir(o.out);
  hsbqr::write_forecast_csv((dir / "forecasts.csv").string(), fc, origin_dates);
  hsbqr::write_series_csv((dir / "realized.csv").string(), origin_dates, realized);
  write_densities(dir / "densities.csv", fc, origin_dates);
  std::vector<std::string> outputs = {"forecasts.csv", "realized.csv"};
  if (fs::exists(dir / "densities.csv")) outputs.emplace_back("densities.csv");
  if (!fc.failures.empty()) {
    std::ofstream log(dir / "failures.log");
    for (const auto& line : fc.failures) log << line << '\n';
    outputs.emplace_back("failures.log");
  }
  json config = {{"input", o.input},       {"target", o.target},
                 {"start_date", o.start_date}, {"growth", o.growth},
                 {"h", o.h},               {"window", o.window},
                 {"expanding", o.expanding},   {"grid", o.grid_n},
                 {"quantiles", o.quantiles},   {"prior", o.prior},
                 {"backend", o.backend},   {"iters", o.iters},
                 {"burn", o.burn},         {"seed", o.seed},
                 {"threads", o.threads},   {"out", o.out}};
  write_manifest(dir, "forecast", o.seed, config, outputs);

  std::cout << "forecast: " << fc.origins.size() << " origins x " << grid.size()
            << " levels, h=" << fc.horizon << ", " << fc.failures.size()
            << " failed chains -> " << dir.string() << '\n';
  if (!fc.values.allFinite() &&
      fc.failures.size() >= static_cast<std::size_t>(fc.values.size())) {
    std::cerr << "forecast: every chain failed\n";
    return 1;
  }
  return 0;
}

struct EvalOptions {
  std::string forecasts;
  std::string realized;
  std::string baseline;
  std::string out = "eval_out";
};

int run_eval(const EvalOptions& o) {
  require_file(o.forecasts, "forecast table");
  require_file(o.realized, "realized table");
  if (!o.baseline.empty()) require_file(o.baseline, "baseline table");

  hsbqr::ForecastFile ff = hsbqr::read_forecast_csv(o.forecasts);
  hsbqr::SeriesFile rf = hsbqr::read_series_csv(o.realized);
  if (rf.dates.size() != ff.origin_dates.size())
    throw std::runtime_error("row mismatch: " + std::to_string(ff.origin_dates.size()) +
                             " forecast origins vs " + std::to_string(rf.dates.size()) +
                             " realized rows");
  for (std::size_t i = 0; i < rf.dates.size(); ++i)
    if (rf.dates[i] != ff.origin_dates[i])
      throw std::runtime_error("row " + std::to_string(i + 2) + ": realized date '" +
                               rf.dates[i] + "' does not match forecast origin '" +
                               ff.origin_dates[i] + "'");

  hsbqr::EvalReport report = hsbqr::evaluate_run(ff.forecasts, rf.values);

  const fs::path dir = prepare_out_dir(o.out);
  hsbqr::write_eval_csv((dir / "eval.csv").string(), {report});
  {
    std::ofstream cov(dir / "coverage.csv");
    if (!cov) throw std::runtime_error("cannot write " + (dir / "coverage.csv").string());
    cov << "level,empirical_coverage\n";
    const auto& levels = ff.forecasts.grid.levels();
    for (std::size_t j = 0; j < levels.size(); ++j)
      cov << hsbqr::format_full(levels[j]) << ','
          << hsbqr::format_full(report.coverage[static_cast<Eigen::Index>(j)]) << '\n';
  }
  write_densities(dir / "densities.csv", ff.forecasts, ff.origin_dates);
  std::vector<std::string> outputs = {"eval.csv", "coverage.csv"};
  if (fs::exists(dir / "densities.csv")) outputs.emplace_back("densities.csv");

  if (!o.baseline.empty()) {
    hsbqr::ForecastFile bf = hsbqr::read_forecast_csv(o.baseline);
    if (bf.origin_dates != ff.origin_dates)
      throw std::runtime_error("baseline origins do not match the forecast table");
    hsbqr::DmResult dm = hsbqr::dm_median_comparison(ff.forecasts, bf.forecasts, rf.values);
    std::ofstream dmf(dir / "dm.csv");
    if (!dmf) throw std::runtime_error("cannot write " + (dir / "dm.csv").string());
    dmf << "statistic,sig_10,sig_5,sig_1\n"
        << hsbqr::format_full(dm.statistic) << ',' << (dm.sig_10 ? 1 : 0) << ','
        << (dm.sig_5 ? 1 : 0) << ',' << (dm.sig_1 ? 1 : 0) << '\n';
    outputs.emplace_back("dm.csv");
  }

  json config = {{"forecasts", o.forecasts},
                 {"realized", o.realized},
                 {"baseline", o.baseline},
                 {"out", o.out}};
  write_manifest(dir, "eval", 0, config, outputs);
  std::cout << "eval: n=" << report.n_evaluated << " skipped=" << report.n_skipped
            << " ks_grid=" << report.ks_grid.statistic
            << " log_score=" << report.avg_log_score << " -> " << dir.string() << '\n';
  return 0;
}

struct SynthOptions {
  int t = 120;
  int k = 8;
  double intercept = 2.0;
  double slope = 0.8;
  std::uint64_t seed = 7;
  std::string out = "panel_out";
};

int run_synth(const SynthOptions& o) {
  hsbqr::SyntheticPanelConfig cfg;
  cfg.t = o.t;
  cfg.k = o.k;
  cfg.intercept = o.intercept;
  cfg.slope = o.slope;
  cfg.seed = o.seed;
  hsbqr::MacroPanel panel;
  try {
    panel = hsbqr::synthetic_panel(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = prepare_out_dir(o.out);
  hsbqr::write_panel_csv((dir / "panel.csv").string(), panel);
  json config = {{"t", o.t},         {"k", o.k},   {"intercept", o.intercept},
                 {"slope", o.slope}, {"seed", o.seed}, {"out", o.out}};
  write_manifest(dir, "synth-panel", o.seed, config, {"panel.csv"});
  std::cout << "synth-panel: " << o.t << " quarters x " << o.k << " regressors -> "
            << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horseshoe-prior Bayesian quantile regression toolkit"};
  app.require_subcommand(1);

  McOptions mo;
  FitOptions fo;
  ForecastOptions ro;
  EvalOptions eo;
  SynthOptions so;

  CLI::App* mc = app.add_subcommand("mc", "Simulation study scoring estimators on known DGPs");
  mc->add_option("--design", mo.design, "Coefficient pattern: sparse|dense|block")
      ->capture_default_str();
  mc->add_option("--error", mo.error, "Error process: y1|y2|y3|y4")->capture_default_str();
  mc->add_option("--train", mo.train, "Training observations per replication")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc->add_option("--holdout", mo.holdout, "Held-out observations scored per replication")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc->add_option("--t1", mo.t1, "Coefficient pattern width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc->add_option("--reps", mo.reps, "Replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc->add_option("--noise-scale", mo.noise, "Error scale multiplier, 0 disables noise")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  mc->add_option("--quantiles", mo.quantiles, "Comma-separated quantile levels")
      ->capture_default_str();
  mc->add_option("--prior", mo.priors, "Estimators to cross: horseshoe,lasso")
      ->capture_default_str();
  mc->add_option("--backend", mo.backend, "Coefficient draw backend: fast|cholesky|auto")
      ->capture_default_str();
  mc->add_option("--iters", mo.iters, "MCMC iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc->add_option("--burn", mo.burn, "Burn-in iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  mc->add_option("--seed", mo.seed, "Master seed")->capture_default_str();
  mc->add_option("--threads", mo.threads, "Worker threads, 0 = HSBQR_THREADS or hardware")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  mc->add_option("--out", mo.out, "Output directory")->capture_default_str();

  CLI::App* fit = app.add_subcommand("fit", "Fit quantile regressions on one panel");
  fit->add_option("--input", fo.input, "Panel CSV path")->required();
  fit->add_option("--target", fo.target, "Target column name")->capture_default_str();
  fit->add_option("--start-date", fo.start_date, "Drop rows before this date");
  fit->add_option("--quantiles", fo.quantiles, "Comma-separated quantile levels")
      ->capture_default_str();
  fit->add_option("--prior", fo.prior, "horseshoe|lasso")->capture_default_str();
  fit->add_option("--backend", fo.backend, "fast|cholesky|auto")->capture_default_str();
  fit->add_option("--iters", fo.iters, "MCMC iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--burn", fo.burn, "Burn-in iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fit->add_option("--seed", fo.seed, "Master seed")->capture_default_str();
  fit->add_option("--out", fo.out, "Output directory")->capture_default_str();

  CLI::App* fc = app.add_subcommand("forecast", "Rolling-origin quantile forecasts");
  // --h is the horizon here, so this subcommand keeps only the long help flag.
  fc->set_help_flag("--help", "Print this help message and exit");
  fc->add_option("--input", ro.input, "Panel CSV path")->required();
  fc->add_option("--target", ro.target, "Target column name")->capture_default_str();
  fc->add_option("--start-date", ro.start_date, "Drop rows before this date");
  fc->add_option("--growth-mode", ro.growth, "Target transform: log|simple|none")
      ->capture_default_str();
  fc->add_option("--h,--horizon", ro.h, "Forecast horizon in quarters")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fc->add_option("--window", ro.window, "Rolling window length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fc->add_flag("--expanding", ro.expanding, "Expanding window instead of rolling");
  fc->add_option("--grid", ro.grid_n, "Equidistant quantile grid size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fc->add_option("--quantiles", ro.quantiles, "Explicit levels overriding --grid");
  fc->add_option("--prior", ro.prior, "horseshoe|lasso")->capture_default_str();
  fc->add_option("--backend", ro.backend, "fast|cholesky|auto")->capture_default_str();
  fc->add_option("--iters", ro.iters, "MCMC iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fc->add_option("--burn", ro.burn, "Burn-in iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fc->add_option("--seed", ro.seed, "Master seed")->capture_default_str();
  fc->add_option("--threads", ro.threads, "Worker threads, 0 = HSBQR_THREADS or hardware")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fc->add_option("--out", ro.out, "Output directory")->capture_default_str();

  CLI::App* ev = app.add_subcommand("eval", "Score a forecast table against realizations");
  ev->add_option("--forecasts", eo.forecasts, "forecasts.csv path")->required();
  ev->add_option("--realized", eo.realized, "realized.csv path")->required();
  ev->add_option("--baseline", eo.baseline, "Competing forecasts.csv for the DM test");
  ev->add_option("--out", eo.out, "Output directory")->capture_default_str();

  CLI::App* sp = app.add_subcommand("synth-panel", "Generate a synthetic quarterly panel");
  sp->add_option("--t", so.t, "Quarters")->check(CLI::PositiveNumber)->capture_default_str();
  sp->add_option("--k", so.k, "Regressor columns")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sp->add_option("--intercept", so.intercept, "Growth equation constant")
      ->capture_default_str();
  sp->add_option("--slope", so.slope, "Loading on the first regressor")
      ->capture_default_str();
  sp->add_option("--seed", so.seed, "Master seed")->capture_default_str();
  sp->add_option("--out", so.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mc) return run_mc(mo);
    if (*fit) return run_fit(fo);
    if (*fc) return run_forecast(ro);
    if (*ev) return run_eval(eo);
    if (*sp) return run_synth(so);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
