#include "hsbqr/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsbqr {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Linear-interpolation quantile of a sorted sample (the common type-7 rule).
double sorted_quantile(const std::vector<double>& s, double p) {
  double pos = p * static_cast<double>(s.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= s.size()) return s.back();
  double w = pos - static_cast<double>(lo);
  return (1.0 - w) * s[lo] + w * s[lo + 1];
}

double check_loss_sum(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& y,
                      double b0, double b1, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += check_loss(y[i] - b0 - b1 * v[i], p);
  return s;
}

// Order statistic minimizing the intercept-only check loss: the ceil(n p)-th
// smallest value (any value in the optimal interval gives the same loss).
double empirical_check_quantile(const Eigen::Ref<const Vector>& y, double p) {
  std::vector<double> s(y.data(), y.data() + y.size());
  std::sort(s.begin(), s.end());
  auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(s.size())));
  k = std::min(std::max<std::size_t>(k, 1), s.size());
  return s[k - 1];
}

}  // namespace

SortedQuantiles sort_quantiles(const Eigen::Ref<const Vector>& values) {
  if (!values.allFinite()) throw std::invalid_argument("sort_quantiles: non-finite input");
  SortedQuantiles out;
  out.values = values;
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i)
    if (values[i + 1] < values[i]) ++out.n_crossings;
  std::sort(out.values.data(), out.values.data() + out.values.size());
  return out;
}

double ForecastDensity::pdf(double x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < centers.size(); ++i)
    s += normal_pdf((x - centers[i]) / bandwidth);
  return s / (bandwidth * static_cast<double>(centers.size()));
}

double ForecastDensity::cdf(double x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < centers.size(); ++i)
    s += normal_cdf((x - centers[i]) / bandwidth);
  return s / static_cast<double>(centers.size());
}

ForecastDensity smooth_to_density(const Eigen::Ref<const Vector>& sorted_values) {
  const Eigen::Index n = sorted_values.size();
  if (n < 2 || !sorted_values.allFinite())
    throw std::invalid_argument("smooth_to_density: need at least two finite values");
  std::vector<double> s(sorted_values.data(), sorted_values.data() + n);
  std::sort(s.begin(), s.end());
  double range = s.back() - s.front();
  if (range <= 0.0)
    throw std::invalid_argument("smooth_to_density: need at least two distinct values");

  double mean = sorted_values.mean();
  double sd = std::sqrt((sorted_values.array() - mean).square().sum() /
                        static_cast<double>(n - 1));
  double iqr = sorted_quantile(s, 0.75) - sorted_quantile(s, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  h = std::max(h, 1e-6 * range);

  ForecastDensity d;
  d.centers = Eigen::Map<const Vector>(s.data(), n);
  d.bandwidth = h;
  return d;
}

double pit(const ForecastDensity& density, double realization) { return density.cdf(realization); }

KsUniformity ks_uniformity(const Eigen::Ref<const Vector>& pits) {
  if (pits.size() == 0) throw std::invalid_argument("ks_uniformity: empty sample");
  std::vector<double> g(pits.data(), pits.data() + pits.size());
  for (double v : g)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ks_uniformity: PIT outside [0,1]");
  std::sort(g.begin(), g.end());
  KsUniformity out;
  out.n = pits.size();
  double n = static_cast<double>(out.n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double hi = std::abs(static_cast<double>(i + 1) / n - g[i]);
    double lo = std::abs(g[i] - static_cast<double>(i) / n);
    out.statistic = std::max(out.statistic, std::max(hi, lo));
  }
  double root_n = std::sqrt(n);
  out.crit_1pct = 1.63 / root_n;
  out.crit_5pct = 1.36 / root_n;
  out.crit_10pct = 1.22 / root_n;
  return out;
}

double avg_log_score(const std::vector<ForecastDensity>& densities,
                     const Eigen::Ref<const Vector>& realizations) {
  if (static_cast<Eigen::Index>(densities.size()) != realizations.size())
    throw std::invalid_argument("avg_log_score: need one density per realization");
  if (densities.empty()) throw std::invalid_argument("avg_log_score: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i)
    s += std::log(std::max(densities[i].pdf(realizations[static_cast<Eigen::Index>(i)]), 1e-300));
  return s / static_cast<double>(densities.size());
}

BivariateQrFit exact_bivariate_qr(const Eigen::Ref<const Vector>& v,
                                  const Eigen::Ref<const Vector>& y, double p) {
  const Eigen::Index n = y.size();
  if (v.size() != n) throw std::invalid_argument("exact_bivariate_qr: length mismatch");
  if (n < 2) throw std::invalid_argument("exact_bivariate_qr: need at least two points");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("exact_bivariate_qr: p outside (0,1)");
  if (!v.allFinite() || !y.allFinite())
    throw std::invalid_argument("exact_bivariate_qr: non-finite input");

  BivariateQrFit best;
  best.loss = std::numeric_limits<double>::infinity();
  auto consider = [&](double b0, double b1) {
    double loss = check_loss_sum(v, y, b0, b1, p);
    double tol = 1e-12 * (1.0 + loss);
    if (loss + tol < best.loss) {
      best = {b0, b1, loss};
      return;
    }
    if (loss > best.loss + tol) return;
    // Loss tie: prefer the flattest line, then the smallest intercept.
    if (std::abs(b1) < std::abs(best.slope) ||
        (std::abs(b1) == std::abs(best.slope) && b0 < best.intercept))
      best = {b0, b1, std::min(loss, best.loss)};
  };

  if ((v.array() == v[0]).all()) {
    double q = empirical_check_quantile(y, p);
    return {q, 0.0, check_loss_sum(v, y, q, 0.0, p)};
  }

  for (Eigen::Index i = 0; i < n; ++i) consider(y[i], 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (v[i] == v[j]) continue;
      double b1 = (y[j] - y[i]) / (v[j] - v[i]);
      consider(y[i] - b1 * v[i], b1);
    }
  return best;
}

double pseudo_r2(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& y, double p) {
  BivariateQrFit fit = exact_bivariate_qr(v, y, p);
  double q = empirical_check_quantile(y, p);
  double tasw = check_loss_sum(v, y, q, 0.0, p);
  if (tasw <= 0.0) return 0.0;
  double r2 = 1.0 - fit.loss / tasw;
  return std::min(1.0, std::max(0.0, r2));
}

DmResult dm_test(const Eigen::Ref<const Vector>& errors_a,
                 const Eigen::Ref<const Vector>& errors_b, int h) {
  const Eigen::Index n = errors_a.size();
  if (errors_b.size() != n) throw std::invalid_argument("dm_test: length mismatch");
  if (h < 1) throw std::invalid_argument("dm_test: horizon must be positive");
  if (n <= h) throw std::invalid_argument("dm_test: need more observations than the horizon");

  Vector d = errors_a - errors_b;
  double dbar = d.mean();
  Vector c = d.array() - dbar;
  double nn = static_cast<double>(n);
  double lrv = c.squaredNorm() / nn;
  for (int j = 1; j < h; ++j)
    lrv += 2.0 * c.tail(n - j).dot(c.head(n - j)) / nn;

  double hh = static_cast<double>(h);
  double correction = std::sqrt((nn + 1.0 - 2.0 * hh + hh * (hh - 1.0) / nn) / nn);
  DmResult out;
  if (lrv <= 0.0) {
    // Degenerate differential: zero-variance series is either identical
    // (statistic 0) or deterministically ordered (infinitely significant).
    out.statistic = dbar == 0.0 ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(), dbar);
  } else {
    out.statistic = correction * dbar / std::sqrt(lrv / nn);
  }
  double a = std::abs(out.statistic);
  out.sig_10 = a > 1.6448536269514722;
  out.sig_5 = a > 1.9599639845400545;
  out.sig_1 = a > 2.5758293035489004;
  return out;
}

}  // namespace hsbqr
