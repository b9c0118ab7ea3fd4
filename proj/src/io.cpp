#include "hsbqr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hsbqr {

std::string format_full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string g17(double v) { return format_full(v); }

std::string g6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) throw std::runtime_error("empty file: " + path);
  return rows;
}

double parse_double(const std::string& cell, const std::string& path, std::size_t row) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad number '" + cell + "' in row " + std::to_string(row + 1) +
                             " of " + path);
  }
}

}  // namespace

void write_panel_csv(const std::string& path, const MacroPanel& panel) {
  if (panel.dates.size() != static_cast<std::size_t>(panel.rows()))
    throw std::invalid_argument("write_panel_csv: date count does not match rows");
  std::ofstream out = open_out(path);
  out << "date";
  for (const auto& name : panel.names) out << ',' << name;
  out << '\n';
  if (!panel.transform_codes.empty()) {
    if (panel.transform_codes.size() != panel.names.size())
      throw std::invalid_argument("write_panel_csv: transform row width mismatch");
    out << "transform";
    for (int code : panel.transform_codes) out << ',' << code;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < panel.rows(); ++i) {
    out << panel.dates[i];
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      out << ',';
      if (std::isfinite(panel.values(i, j))) out << g17(panel.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_forecast_csv(const std::string& path, const QuantileForecastSet& fc,
                        const std::vector<std::string>& origin_dates) {
  if (origin_dates.size() != fc.origins.size())
    throw std::invalid_argument("write_forecast_csv: date count does not match origins");
  std::ofstream out = open_out(path);
  out << "origin_date,origin_index,horizon";
  for (double p : fc.grid.levels()) out << ",p" << g6(p);
  out << '\n';
  for (std::size_t i = 0; i < fc.origins.size(); ++i) {
    out << origin_dates[i] << ',' << fc.origins[i] << ',' << fc.horizon;
    for (Eigen::Index j = 0; j < fc.values.cols(); ++j)
      out << ',' << g17(fc.values(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ForecastFile read_forecast_csv(const std::string& path) {
  auto rows = read_table(path);
  const auto& header = rows[0];
  if (header.size() < 4 || header[0] != "origin_date" || header[1] != "origin_index" ||
      header[2] != "horizon")
    throw std::runtime_error("not a forecast table: " + path);
  std::vector<double> levels;
  for (std::size_t j = 3; j < header.size(); ++j) {
    if (header[j].empty() || header[j][0] != 'p')
      throw std::runtime_error("bad quantile column '" + header[j] + "' in " + path);
    levels.push_back(parse_double(header[j].substr(1), path, 0));
  }
  if (rows.size() < 2) throw std::runtime_error("no forecast rows in " + path);

  ForecastFile file;
  file.forecasts.grid = QuantileGrid(levels);
  const std::size_t n = rows.size() - 1;
  file.forecasts.values.resize(static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(levels.size()));
  int horizon = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i + 1];
    if (r.size() != header.size())
      throw std::runtime_error("row " + std::to_string(i + 2) + " of " + path +
                               " has the wrong width");
    file.origin_dates.push_back(r[0]);
    file.forecasts.origins.push_back(
        static_cast<int>(parse_double(r[1], path, i + 1)));
    int h = static_cast<int>(parse_double(r[2], path, i + 1));
    if (horizon < 0) horizon = h;
    if (h != horizon) throw std::runtime_error("mixed horizons in " + path);
    for (std::size_t j = 3; j < r.size(); ++j)
      file.forecasts.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 3)) =
          parse_double(r[j], path, i + 1);
  }
  file.forecasts.horizon = horizon;
  return file;
}

void write_series_csv(const std::string& path, const std::vector<std::string>& dates,
                      const Eigen::Ref<const Vector>& values) {
  if (dates.size() != static_cast<std::size_t>(values.size()))
    throw std::invalid_argument("write_series_csv: date count does not match values");
  std::ofstream out = open_out(path);
  out << "date,value\n";
  for (std::size_t i = 0; i < dates.size(); ++i)
    out << dates[i] << ',' << g17(values[static_cast<Eigen::Index>(i)]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

SeriesFile read_series_csv(const std::string& path) {
  auto rows = read_table(path);
  if (rows[0].size() != 2 || rows[0][0] != "date" || rows[0][1] != "value")
    throw std::runtime_error("not a date,value table: " + path);
  SeriesFile file;
  file.values.resize(static_cast<Eigen::Index>(rows.size()) - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw std::runtime_error("row " + std::to_string(i + 1) + " of " + path +
                               " has the wrong width");
    file.dates.push_back(rows[i][0]);
    file.values[static_cast<Eigen::Index>(i - 1)] = parse_double(rows[i][1], path, i);
  }
  return file;
}

void write_mc_tables(const std::string& out_dir, const McResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& quantiles = result.config.quantiles;
  const auto& priors = result.config.priors;

  // One table per metric, estimators down, quantile levels across.
  for (const char* metric : {"rmcb", "rmsfe"}) {
    std::ofstream out = open_out((fs::path(out_dir) / (std::string(metric) + ".csv")).string());
    out << "estimator";
    for (double p : quantiles) out << ",p" << g6(p);
    out << '\n';
    for (PriorKind prior : priors) {
      out << prior_kind_name(prior);
      for (double p : quantiles) {
        const McCell& c = result.cell(prior, p);
        out << ',' << g6(std::string(metric) == "rmcb" ? c.rmcb : c.rmsfe);
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed in " + out_dir);
  }

  {
    std::ofstream out = open_out((fs::path(out_dir) / "cells.csv").string());
    out << "estimator,p,rmcb,rmsfe,n_ok\n";
    for (const McCell& c : result.cells)
      out << prior_kind_name(c.prior) << ',' << g6(c.p) << ',' << g17(c.rmcb) << ','
          << g17(c.rmsfe) << ',' << c.n_ok << '\n';
    if (!out) throw std::runtime_error("write failed in " + out_dir);
  }

  if (!result.failures.empty()) {
    std::ofstream out = open_out((fs::path(out_dir) / "failures.log").string());
    for (const auto& line : result.failures) out << line << '\n';
    if (!out) throw std::runtime_error("write failed in " + out_dir);
  }
}

void write_eval_csv(const std::string& path, const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("write_eval_csv: no reports");
  for (const auto& r : reports)
    if (r.r2_levels != reports[0].r2_levels)
      throw std::invalid_argument("write_eval_csv: reports disagree on pseudo-R2 levels");
  std::ofstream out = open_out(path);
  out << "horizon,n_evaluated,n_skipped,total_crossings,ks_grid,ks_grid_crit_10,ks_grid_crit_5,"
         "ks_grid_crit_1,ks_origins,ks_origins_crit_10,ks_origins_crit_5,ks_origins_crit_1,"
         "avg_log_score,median_rmsfe";
  for (double p : reports[0].r2_levels) out << ",pseudo_r2_p" << g6(p);
  out << '\n';
  for (const auto& r : reports) {
    out << r.horizon << ',' << r.n_evaluated << ',' << r.n_skipped << ',' << r.total_crossings
        << ',' << g17(r.ks_grid.statistic) << ',' << g17(r.ks_grid.crit_10pct) << ','
        << g17(r.ks_grid.crit_5pct) << ',' << g17(r.ks_grid.crit_1pct) << ','
        << g17(r.ks_origins.statistic) << ',' << g17(r.ks_origins.crit_10pct) << ','
        << g17(r.ks_origins.crit_5pct) << ',' << g17(r.ks_origins.crit_1pct) << ','
        << g17(r.avg_log_score) << ',' << g17(r.median_rmsfe);
    for (double v : r.pseudo_r2s) out << ',' << g17(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_density_grid_csv(const std::string& path,
                            const std::vector<ForecastDensity>& densities,
                            const std::vector<std::string>& origin_dates, int n_points) {
  if (densities.size() != origin_dates.size())
    throw std::invalid_argument("write_density_grid_csv: date count does not match densities");
  if (n_points < 2) throw std::invalid_argument("write_density_grid_csv: need at least 2 points");
  std::ofstream out = open_out(path);
  out << "origin_date,x,pdf,cdf\n";
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const ForecastDensity& d = densities[i];
    if (d.centers.size() == 0)
      throw std::invalid_argument("write_density_grid_csv: empty density");
    const double lo = d.centers.minCoeff() - 4.0 * d.bandwidth;
    const double hi = d.centers.maxCoeff() + 4.0 * d.bandwidth;
    const double step = (hi - lo) / (n_points - 1);
    for (int g = 0; g < n_points; ++g) {
      const double x = lo + step * g;
      out << origin_dates[i] << ',' << g17(x) << ',' << g17(d.pdf(x)) << ',' << g17(d.cdf(x))
          << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hsbqr
