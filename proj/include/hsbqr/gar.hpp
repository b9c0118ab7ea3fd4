#ifndef HSBQR_GAR_HPP
#define HSBQR_GAR_HPP

#include <string>
#include <vector>

#include "hsbqr/density.hpp"
#include "hsbqr/sampler.hpp"

namespace hsbqr {

// Quarterly macro panel: normalized YYYYQq date labels plus named numeric
// columns. transform_codes follow the quarterly-database convention
// (1 none, 2 diff, 3 double diff, 4 log, 5 log diff, 6 double log diff,
// 7 diff of percent change); they are applied by load_panel when the file
// carries a transform row, and rows lost to differencing are trimmed so all
// columns stay aligned.
struct MacroPanel {
  std::vector<std::string> dates;
  std::vector<std::string> names;
  Matrix values;
  std::vector<int> transform_codes;           // empty when the file has none
  std::vector<std::string> dropped_columns;   // dropped for missing values

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  // Column index by name, -1 when absent.
  Eigen::Index column(const std::string& name) const;
};

struct PanelSchema {
  std::string target;        // must name a surviving column
  std::string start_date;    // drop earlier rows when non-empty (any accepted date format)
};

// Normalizes "YYYYQq", "YYYY-MM-DD" or "MM/DD/YYYY" to a "YYYYQq" label;
// throws on anything else.
std::string normalize_quarter(const std::string& raw);

// Parses a delimited panel (first column dates, header row of names,
// optional transform row right under the header whose first cell starts
// with "transform"). Applies transform codes, trims rows before the start
// date, drops columns left with missing values and records them. Throws if
// the file is unreadable, a date is malformed (naming the row), or the
// target column is absent or dropped.
MacroPanel load_panel(const std::string& path, const PanelSchema& schema);

// Quarter-on-quarter growth of a positive level series, one entry shorter
// than the input. log_annualized gives 400 (log x_t - log x_{t-1}); simple
// compounds the quarterly percent change, 100 ((x_t/x_{t-1})^4 - 1).
enum class GrowthMode { log_annualized, simple_annualized };
Vector growth_transform(const Eigen::Ref<const Vector>& levels,
                        GrowthMode mode = GrowthMode::log_annualized);

// Rolling-origin direct-projection plan. An origin is the index of the last
// observation visible when the forecast is made; with window W and horizon
// h the training pairs at origin o are (x_s, y_{s+h}) for s in
// [o-W+1, o-h] (from 0 when expanding), and the forecast targets index o+h.
// Origins run from W-1 through T-1-h, so their count is T - W - h + 1.
struct RollingPlan {
  int window = 50;
  int horizon = 1;
  bool expanding = false;
  std::vector<int> origins;

  static RollingPlan make(Eigen::Index t_available, int window, int horizon,
                          bool expanding = false);
};

struct RollingConfig {
  SamplerConfig sampler;
  std::uint64_t seed = 1;
  int n_threads = 1;
};

// Per-origin quantile forecasts on a grid. values(i, j) is the level-j
// forecast made at origins[i]; failed chains leave NaN and a log line.
struct QuantileForecastSet {
  int horizon = 1;
  QuantileGrid grid = QuantileGrid::equidistant(19);
  std::vector<int> origins;
  Matrix values;
  std::vector<std::string> failures;
};

// Fits one chain per origin and grid level on the in-window direct
// projection pairs and evaluates it at the origin's regressors. All window
// statistics (standardization included) come from inside the window, and
// results are byte-identical for any thread count.
QuantileForecastSet rolling_forecast(const Eigen::Ref<const Matrix>& x,
                                     const Eigen::Ref<const Vector>& y, const RollingPlan& plan,
                                     const QuantileGrid& grid, const RollingConfig& cfg);

// Realized target y[origin + horizon] per origin.
Vector realized_targets(const QuantileForecastSet& fc, const Eigen::Ref<const Vector>& y);

// Scorecard for one forecast run. Two Kolmogorov-Smirnov variants are
// reported: ks_grid feeds the per-level empirical coverage frequencies (one
// value per grid level, the small-n variant matching 19-point critical
// values) and ks_origins feeds the per-origin PITs of the smoothed
// densities. r2_levels holds the grid levels actually used for pseudo_r2.
struct EvalReport {
  int horizon = 1;
  Eigen::Index n_evaluated = 0;
  Eigen::Index n_skipped = 0;
  int total_crossings = 0;
  KsUniformity ks_grid;
  KsUniformity ks_origins;
  double avg_log_score = 0.0;
  double median_rmsfe = 0.0;
  std::vector<double> r2_levels;
  std::vector<double> pseudo_r2s;
  Vector coverage;   // per grid level
  Vector pits;       // per evaluated origin
};

// Evaluates a run against aligned realizations (one per origin). Origins
// with non-finite forecasts or realizations are skipped and counted.
// Pseudo-R2 is computed at the grid levels nearest {0.05, 0.25, 0.5, 0.75,
// 0.95}; median RMSFE uses the level nearest 0.5.
EvalReport evaluate_run(const QuantileForecastSet& fc,
                        const Eigen::Ref<const Vector>& realizations);

// Diebold-Mariano comparison of two runs' median-forecast squared errors at
// the runs' common horizon. Positive statistic: the first run loses.
DmResult dm_median_comparison(const QuantileForecastSet& a, const QuantileForecastSet& b,
                              const Eigen::Ref<const Vector>& realizations);

// Small self-contained quarterly panel for demos and pipeline tests: AR(1)-
// correlated regressor columns and a positive target level series whose
// log-annualized growth is linear in the regressors plus standard normal
// noise. Dates start at 1962Q1; the target column carries transform code 1
// so the growth transform stays in the caller's hands.
struct SyntheticPanelConfig {
  int t = 120;
  int k = 8;                 // regressor columns
  double intercept = 2.0;    // growth equation constant
  double slope = 0.8;        // loading of the first regressor
  std::uint64_t seed = 7;
};
MacroPanel synthetic_panel(const SyntheticPanelConfig& cfg);

}  // namespace hsbqr

#endif
