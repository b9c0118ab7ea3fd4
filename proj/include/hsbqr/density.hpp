#ifndef HSBQR_DENSITY_HPP
#define HSBQR_DENSITY_HPP

#include <vector>

#include "hsbqr/quantile.hpp"

namespace hsbqr {

// Ascending rearrangement of a quantile forecast vector together with the
// number of adjacent descents in the input, a cheap crossing diagnostic.
struct SortedQuantiles {
  Vector values;
  int n_crossings = 0;
};
SortedQuantiles sort_quantiles(const Eigen::Ref<const Vector>& values);

// Equal-weight Gaussian mixture over a set of forecasted quantile points.
// pdf and cdf are exact mixture expressions, so the cdf is monotone from 0
// to 1 by construction.
struct ForecastDensity {
  Vector centers;
  double bandwidth = 1.0;

  double pdf(double x) const;
  double cdf(double x) const;
};

// Kernel-smooths sorted quantile values into a density. Bandwidth by
// Silverman's rule on the quantile points, 0.9 min(sd, iqr/1.34) n^{-1/5},
// floored at 1e-6 times the point range. Throws unless the input has at
// least two distinct values.
ForecastDensity smooth_to_density(const Eigen::Ref<const Vector>& sorted_values);

// Probability integral transform: the forecast CDF at the realization.
double pit(const ForecastDensity& density, double realization);

// Kolmogorov-Smirnov distance of the PIT sample from the uniform CDF, with
// the asymptotic critical values c(alpha)/sqrt(n), c = 1.63 / 1.36 / 1.22.
struct KsUniformity {
  double statistic = 0.0;
  double crit_1pct = 0.0;
  double crit_5pct = 0.0;
  double crit_10pct = 0.0;
  Eigen::Index n = 0;
};
KsUniformity ks_uniformity(const Eigen::Ref<const Vector>& pits);

// Mean log predictive density over paired (density, realization) series;
// densities are floored at 1e-300 before the log.
double avg_log_score(const std::vector<ForecastDensity>& densities,
                     const Eigen::Ref<const Vector>& realizations);

// Exact bivariate quantile regression y ~ b0 + b1 v at level p, found by
// enumerating every line through two observations with distinct abscissae
// plus every horizontal line through one observation; an optimal check-loss
// line always interpolates such a candidate. Ties broken by lowest loss,
// then smallest |slope|, then smallest intercept. All-equal v degenerates to
// the intercept-only empirical quantile with zero slope.
struct BivariateQrFit {
  double intercept = 0.0;
  double slope = 0.0;
  double loss = 0.0;
};
BivariateQrFit exact_bivariate_qr(const Eigen::Ref<const Vector>& v,
                                  const Eigen::Ref<const Vector>& y, double p);

// Check-loss analogue of R^2: one minus the ratio of the bivariate fit's
// loss to the intercept-only loss. In [0, 1] because the intercept-only
// minimizer is inside the bivariate candidate set; 0 when all y are equal.
double pseudo_r2(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& y, double p);

// Diebold-Mariano comparison of two loss series (e.g. squared forecast
// errors) at horizon h: statistic on the mean differential a - b with a
// rectangular-kernel long-run variance using h-1 autocovariance lags and the
// Harvey-Leybourne-Newbold small-sample factor
// sqrt((n + 1 - 2h + h(h-1)/n)/n). Positive statistic means the first series
// loses. Flags are two-sided normal at 10/5/1%. Requires n > h.
struct DmResult {
  double statistic = 0.0;
  bool sig_10 = false;
  bool sig_5 = false;
  bool sig_1 = false;
};
DmResult dm_test(const Eigen::Ref<const Vector>& errors_a, const Eigen::Ref<const Vector>& errors_b,
                 int h);

}  // namespace hsbqr

#endif
