#include "hsbqr/gar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "hsbqr/mc_lab.hpp"
#include "hsbqr/parallel.hpp"

namespace hsbqr {

namespace {

constexpr std::uint64_t kForecastTag = 0x464f5243;  // "FORC"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low;
  for (char c : cell) low.push_back(static_cast<char>(std::tolower(c)));
  return low == "na" || low == "nan" || low == "n/a" || low == ".";
}

std::string quarter_label(int year, int q) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04dQ%d", year, q);
  return buf;
}

// Rows of history a transform code consumes before producing values.
int transform_lead(int code) {
  switch (code) {
    case 1:
    case 4:
      return 0;
    case 2:
    case 5:
    case 7:
      return 1;
    case 3:
    case 6:
      return 2;
    default:
      throw std::invalid_argument("load_panel: unknown transform code " + std::to_string(code));
  }
}

// In-place column transform; entries that cannot be produced become NaN.
void apply_transform(Eigen::Ref<Vector> col, int code) {
  const Eigen::Index t = col.size();
  Vector out = Vector::Constant(t, kNaN);
  auto log_at = [&](Eigen::Index i) { return col[i] > 0.0 ? std::log(col[i]) : kNaN; };
  switch (code) {
    case 1:
      return;
    case 2:
      for (Eigen::Index i = 1; i < t; ++i) out[i] = col[i] - col[i - 1];
      break;
    case 3:
      for (Eigen::Index i = 2; i < t; ++i) out[i] = col[i] - 2.0 * col[i - 1] + col[i - 2];
      break;
    case 4:
      for (Eigen::Index i = 0; i < t; ++i) out[i] = log_at(i);
      break;
    case 5:
      for (Eigen::Index i = 1; i < t; ++i) out[i] = log_at(i) - log_at(i - 1);
      break;
    case 6:
      for (Eigen::Index i = 2; i < t; ++i)
        out[i] = log_at(i) - 2.0 * log_at(i - 1) + log_at(i - 2);
      break;
    case 7:
      for (Eigen::Index i = 2; i < t; ++i) {
        double a = col[i - 1] != 0.0 ? col[i] / col[i - 1] - 1.0 : kNaN;
        double b = col[i - 2] != 0.0 ? col[i - 1] / col[i - 2] - 1.0 : kNaN;
        out[i] = a - b;
      }
      break;
    default:
      throw std::invalid_argument("load_panel: unknown transform code " + std::to_string(code));
  }
  col = out;
}

}  // namespace

Eigen::Index MacroPanel::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<Eigen::Index>(j);
  return -1;
}

std::string normalize_quarter(const std::string& raw) {
  static const std::regex quarterly(R"(^(\d{4})[Qq]([1-4])$)");
  static const std::regex iso(R"(^(\d{4})-(\d{1,2})-(\d{1,2})$)");
  static const std::regex us(R"(^(\d{1,2})/(\d{1,2})/(\d{4})$)");
  std::smatch m;
  std::string s = trim(raw);
  if (std::regex_match(s, m, quarterly))
    return quarter_label(std::stoi(m[1]), std::stoi(m[2]));
  if (std::regex_match(s, m, iso)) {
    int month = std::stoi(m[2]);
    if (month < 1 || month > 12) throw std::invalid_argument("bad month in date: " + raw);
    return quarter_label(std::stoi(m[1]), (month - 1) / 3 + 1);
  }
  if (std::regex_match(s, m, us)) {
    int month = std::stoi(m[1]);
    if (month < 1 || month > 12) throw std::invalid_argument("bad month in date: " + raw);
    return quarter_label(std::stoi(m[3]), (month - 1) / 3 + 1);
  }
  throw std::invalid_argument("unrecognized date: " + raw);
}

MacroPanel load_panel(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_panel: cannot open " + path);

  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) lines.push_back(line);
  }
  if (lines.size() < 2) throw std::runtime_error("load_panel: no data rows in " + path);

  auto header = split_csv(lines[0]);
  if (header.size() < 2) throw std::runtime_error("load_panel: header needs a date and a column");
  MacroPanel panel;
  panel.names.assign(header.begin() + 1, header.end());
  const std::size_t k = panel.names.size();

  std::size_t row0 = 1;
  {
    auto first = split_csv(lines[1]);
    std::string tag;
    for (char c : first.empty() ? std::string() : first[0])
      tag.push_back(static_cast<char>(std::tolower(c)));
    if (tag.rfind("transform", 0) == 0) {
      if (first.size() != k + 1)
        throw std::runtime_error("load_panel: transform row width mismatch");
      for (std::size_t j = 1; j <= k; ++j)
        panel.transform_codes.push_back(first[j].empty() ? 1 : std::stoi(first[j]));
      row0 = 2;
    }
  }

  const std::size_t t = lines.size() - row0;
  if (t == 0) throw std::runtime_error("load_panel: no data rows in " + path);
  panel.values = Matrix::Constant(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k),
                                  kNaN);
  panel.dates.reserve(t);
  for (std::size_t i = 0; i < t; ++i) {
    auto cells = split_csv(lines[row0 + i]);
    if (cells.size() != k + 1) {
      std::ostringstream msg;
      msg << "load_panel: row " << row0 + i + 1 << " has " << cells.size() << " cells, expected "
          << k + 1;
      throw std::runtime_error(msg.str());
    }
    try {
      panel.dates.push_back(normalize_quarter(cells[0]));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "load_panel: row " << row0 + i + 1 << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (is_missing(cells[j + 1])) continue;
      std::size_t used = 0;
      double v = kNaN;
      try {
        v = std::stod(cells[j + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[j + 1].size())
        throw std::runtime_error("load_panel: bad number '" + cells[j + 1] + "' in row " +
                                 std::to_string(row0 + i + 1));
      panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }

  if (!std::is_sorted(panel.dates.begin(), panel.dates.end()))
    throw std::runtime_error("load_panel: dates out of order");

  // Apply transform codes, then drop the leading rows every code needs.
  Eigen::Index trim_lead = 0;
  if (!panel.transform_codes.empty()) {
    for (std::size_t j = 0; j < k; ++j) {
      apply_transform(panel.values.col(static_cast<Eigen::Index>(j)), panel.transform_codes[j]);
      trim_lead = std::max<Eigen::Index>(trim_lead, transform_lead(panel.transform_codes[j]));
    }
  }

  Eigen::Index start = trim_lead;
  if (!schema.start_date.empty()) {
    std::string cutoff = normalize_quarter(schema.start_date);
    while (start < panel.values.rows() &&
           panel.dates[static_cast<std::size_t>(start)] < cutoff)
      ++start;
  }
  if (start >= panel.values.rows()) throw std::runtime_error("load_panel: start date trims everything");
  if (start > 0) {
    panel.values = panel.values.bottomRows(panel.values.rows() - start).eval();
    panel.dates.erase(panel.dates.begin(), panel.dates.begin() + start);
  }

  // Drop columns that still carry missing values.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < panel.values.cols(); ++j) {
    if (panel.values.col(j).allFinite())
      keep.push_back(j);
    else
      panel.dropped_columns.push_back(panel.names[static_cast<std::size_t>(j)]);
  }
  if (keep.size() != panel.names.size()) {
    Matrix kept(panel.values.rows(), static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> kept_names;
    std::vector<int> kept_codes;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      kept.col(static_cast<Eigen::Index>(j)) = panel.values.col(keep[j]);
      kept_names.push_back(panel.names[static_cast<std::size_t>(keep[j])]);
      if (!panel.transform_codes.empty())
        kept_codes.push_back(panel.transform_codes[static_cast<std::size_t>(keep[j])]);
    }
    panel.values = std::move(kept);
    panel.names = std::move(kept_names);
    panel.transform_codes = std::move(kept_codes);
  }

  if (schema.target.empty() || panel.column(schema.target) < 0)
    throw std::runtime_error("load_panel: target column '" + schema.target +
                             "' missing or dropped");
  return panel;
}

Vector growth_transform(const Eigen::Ref<const Vector>& levels, GrowthMode mode) {
  if (levels.size() < 2) throw std::invalid_argument("growth_transform: need two levels");
  if (!(levels.minCoeff() > 0.0))
    throw std::invalid_argument("growth_transform: levels must be positive");
  Vector g(levels.size() - 1);
  for (Eigen::Index i = 1; i < levels.size(); ++i) {
    double ratio = levels[i] / levels[i - 1];
    g[i - 1] = mode == GrowthMode::log_annualized
                   ? 400.0 * std::log(ratio)
                   : 100.0 * (std::pow(ratio, 4.0) - 1.0);
  }
  return g;
}

RollingPlan RollingPlan::make(Eigen::Index t_available, int window, int horizon, bool expanding) {
  if (horizon < 1) throw std::invalid_argument("rolling plan: horizon must be at least 1");
  if (window < horizon + 2)
    throw std::invalid_argument("rolling plan: window must exceed horizon by at least 2");
  if (t_available < window + horizon)
    throw std::invalid_argument("rolling plan: series shorter than window + horizon");
  RollingPlan plan;
  plan.window = window;
  plan.horizon = horizon;
  plan.expanding = expanding;
  for (int o = window - 1; o <= static_cast<int>(t_available) - 1 - horizon; ++o)
    plan.origins.push_back(o);
  return plan;
}

QuantileForecastSet rolling_forecast(const Eigen::Ref<const Matrix>& x,
                                     const Eigen::Ref<const Vector>& y, const RollingPlan& plan,
                                     const QuantileGrid& grid, const RollingConfig& cfg) {
  const Eigen::Index t = x.rows();
  if (y.size() != t) throw std::invalid_argument("rolling_forecast: x rows and y length differ");
  if (plan.origins.empty()) throw std::invalid_argument("rolling_forecast: empty plan");
  for (int o : plan.origins) {
    const int lo = plan.expanding ? 0 : o - plan.window + 1;
    if (lo < 0 || o >= static_cast<int>(t) || o - plan.horizon - lo + 1 < 2)
      throw std::invalid_argument("rolling_forecast: plan overruns the series");
  }
  cfg.sampler.validate();

  const int n_o = static_cast<int>(plan.origins.size());
  const int n_q = grid.size();
  QuantileForecastSet out;
  out.horizon = plan.horizon;
  out.grid = grid;
  out.origins = plan.origins;
  out.values = Matrix::Constant(n_o, n_q, kNaN);

  std::vector<std::string> failures(static_cast<std::size_t>(n_o) * n_q);
  const int h = plan.horizon;
  parallel_for(n_o * n_q, resolve_threads(cfg.n_threads), [&](int idx) {
    const int oi = idx / n_q, qi = idx % n_q;
    const int o = plan.origins[static_cast<std::size_t>(oi)];
    const int lo = plan.expanding ? 0 : o - plan.window + 1;
    const int n_pairs = o - h - lo + 1;
    try {
      Rng rng(cfg.seed, substream(kForecastTag, static_cast<std::uint64_t>(oi),
                                  static_cast<std::uint64_t>(qi)));
      StandardizedFit fit = fit_with_intercept(rng, x.middleRows(lo, n_pairs),
                                               y.segment(lo + h, n_pairs),
                                               quantile_constants(grid[qi]), cfg.sampler);
      out.values(oi, qi) = fit.coefficients[0] +
                           x.row(o).dot(fit.coefficients.tail(fit.coefficients.size() - 1));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "origin " << o << " p " << grid[qi] << ": " << e.what();
      failures[static_cast<std::size_t>(idx)] = msg.str();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) out.failures.push_back(f);
  return out;
}

Vector realized_targets(const QuantileForecastSet& fc, const Eigen::Ref<const Vector>& y) {
  Vector r(static_cast<Eigen::Index>(fc.origins.size()));
  for (std::size_t i = 0; i < fc.origins.size(); ++i) {
    int at = fc.origins[i] + fc.horizon;
    if (at < 0 || at >= y.size())
      throw std::invalid_argument("realized_targets: origin + horizon outside the series");
    r[static_cast<Eigen::Index>(i)] = y[at];
  }
  return r;
}

EvalReport evaluate_run(const QuantileForecastSet& fc,
                        const Eigen::Ref<const Vector>& realizations) {
  const Eigen::Index n = fc.values.rows();
  const int n_q = fc.grid.size();
  if (realizations.size() != n)
    throw std::invalid_argument("evaluate_run: one realization per origin required");

  std::vector<Eigen::Index> ok;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::isfinite(realizations[i]) && fc.values.row(i).allFinite() &&
        fc.values.row(i).maxCoeff() > fc.values.row(i).minCoeff())
      ok.push_back(i);
  EvalReport rep;
  rep.horizon = fc.horizon;
  rep.n_evaluated = static_cast<Eigen::Index>(ok.size());
  rep.n_skipped = n - rep.n_evaluated;
  if (ok.size() < 2) throw std::invalid_argument("evaluate_run: fewer than two usable origins");

  rep.pits = Vector(rep.n_evaluated);
  std::vector<ForecastDensity> densities;
  densities.reserve(ok.size());
  Vector y(rep.n_evaluated);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    SortedQuantiles s = sort_quantiles(fc.values.row(ok[i]).transpose());
    rep.total_crossings += s.n_crossings;
    densities.push_back(smooth_to_density(s.values));
    y[static_cast<Eigen::Index>(i)] = realizations[ok[i]];
    rep.pits[static_cast<Eigen::Index>(i)] = pit(densities.back(), y[static_cast<Eigen::Index>(i)]);
  }
  rep.ks_origins = ks_uniformity(rep.pits);
  rep.avg_log_score = avg_log_score(densities, y);

  rep.coverage = Vector(n_q);
  for (int j = 0; j < n_q; ++j) {
    double hit = 0.0;
    for (std::size_t i = 0; i < ok.size(); ++i)
      if (y[static_cast<Eigen::Index>(i)] <= fc.values(ok[i], j)) hit += 1.0;
    rep.coverage[j] = hit / static_cast<double>(ok.size());
  }
  rep.ks_grid = ks_uniformity(rep.coverage);

  auto nearest_level = [&](double p) {
    int best = 0;
    for (int j = 1; j < n_q; ++j)
      if (std::abs(fc.grid[j] - p) < std::abs(fc.grid[best] - p)) best = j;
    return best;
  };

  int med = nearest_level(0.5);
  double se = 0.0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    double e = y[static_cast<Eigen::Index>(i)] - fc.values(ok[i], med);
    se += e * e;
  }
  rep.median_rmsfe = std::sqrt(se / static_cast<double>(ok.size()));

  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    int j = nearest_level(p);
    Vector v(rep.n_evaluated);
    for (std::size_t i = 0; i < ok.size(); ++i) v[static_cast<Eigen::Index>(i)] = fc.values(ok[i], j);
    rep.r2_levels.push_back(fc.grid[j]);
    rep.pseudo_r2s.push_back(pseudo_r2(v, y, fc.grid[j]));
  }
  return rep;
}

DmResult dm_median_comparison(const QuantileForecastSet& a, const QuantileForecastSet& b,
                              const Eigen::Ref<const Vector>& realizations) {
  if (a.horizon != b.horizon)
    throw std::invalid_argument("dm_median_comparison: horizon mismatch");
  if (a.origins != b.origins)
    throw std::invalid_argument("dm_median_comparison: origin mismatch");
  const Eigen::Index n = a.values.rows();
  if (realizations.size() != n)
    throw std::invalid_argument("dm_median_comparison: one realization per origin required");

  auto median_col = [](const QuantileForecastSet& fc) {
    int best = 0;
    for (int j = 1; j < fc.grid.size(); ++j)
      if (std::abs(fc.grid[j] - 0.5) < std::abs(fc.grid[best] - 0.5)) best = j;
    return best;
  };
  const int ja = median_col(a), jb = median_col(b);

  std::vector<double> ea, eb;
  for (Eigen::Index i = 0; i < n; ++i) {
    double fa = a.values(i, ja), fb = b.values(i, jb), y = realizations[i];
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(y)) continue;
    ea.push_back((y - fa) * (y - fa));
    eb.push_back((y - fb) * (y - fb));
  }
  Eigen::Map<const Vector> ma(ea.data(), static_cast<Eigen::Index>(ea.size()));
  Eigen::Map<const Vector> mb(eb.data(), static_cast<Eigen::Index>(eb.size()));
  return dm_test(ma, mb, a.horizon);
}

MacroPanel synthetic_panel(const SyntheticPanelConfig& cfg) {
  if (cfg.t < 3 || cfg.k < 1) throw std::invalid_argument("synthetic_panel: t >= 3, k >= 1");
  Rng rng(cfg.seed, substream(0x50414e4c));  // "PANL"
  MacroPanel panel;
  Matrix x = generate_design(rng, cfg.t, cfg.k);

  Vector levels(cfg.t);
  levels[0] = 100.0;
  for (int i = 1; i < cfg.t; ++i) {
    double growth = cfg.intercept + cfg.slope * x(i - 1, 0) + rng.normal();
    levels[i] = levels[i - 1] * std::exp(growth / 400.0);
  }

  panel.values = Matrix(cfg.t, cfg.k + 1);
  panel.values.col(0) = levels;
  panel.values.rightCols(cfg.k) = x;
  panel.names.push_back("GDP");
  for (int j = 1; j <= cfg.k; ++j) panel.names.push_back("x" + std::to_string(j));
  for (int i = 0; i < cfg.t; ++i)
    panel.dates.push_back(quarter_label(1962 + i / 4, i % 4 + 1));
  return panel;
}

}  // namespace hsbqr
