#ifndef HSBQR_IO_HPP
#define HSBQR_IO_HPP

#include <string>
#include <vector>

#include "hsbqr/gar.hpp"
#include "hsbqr/mc_lab.hpp"

namespace hsbqr {

inline constexpr const char* kVersion = "0.1.0";

// %.17g with fixed non-finite spellings; round-trips every double.
std::string format_full(double v);

// Writers emit deterministic text: fixed column order, %.17g numerics (exact
// double round-trip), no timestamps. All throw std::runtime_error on I/O
// failure.

void write_panel_csv(const std::string& path, const MacroPanel& panel);

// Forecast table: origin_date, origin_index, horizon, then one p<level>
// column per grid level.
void write_forecast_csv(const std::string& path, const QuantileForecastSet& fc,
                        const std::vector<std::string>& origin_dates);

struct ForecastFile {
  QuantileForecastSet forecasts;
  std::vector<std::string> origin_dates;
};
ForecastFile read_forecast_csv(const std::string& path);

// Two-column date,value table, used for realized targets.
void write_series_csv(const std::string& path, const std::vector<std::string>& dates,
                      const Eigen::Ref<const Vector>& values);
struct SeriesFile {
  std::vector<std::string> dates;
  Vector values;
};
SeriesFile read_series_csv(const std::string& path);

// Monte Carlo study tables: one row per prior, one column per quantile
// level; separate files for each metric plus a long-format cell dump.
void write_mc_tables(const std::string& out_dir, const McResult& result);

// Scorecard rows, one per report.
void write_eval_csv(const std::string& path, const std::vector<EvalReport>& reports);

// Plot-ready density grids: origin_date, x, pdf, cdf rows, n_points per
// origin spanning the mixture support.
void write_density_grid_csv(const std::string& path, const std::vector<ForecastDensity>& densities,
                            const std::vector<std::string>& origin_dates, int n_points = 201);

}  // namespace hsbqr

#endif
