#include "hsbqr/quantile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hsbqr {

QuantileSpec quantile_constants(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("quantile_constants: level must lie strictly inside (0, 1)");
  double pq = p * (1.0 - p);
  return {p, (1.0 - 2.0 * p) / pq, 2.0 / pq};
}

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("QuantileGrid: no levels");
  double prev = 0.0;
  for (double p : levels_) {
    if (!(p > prev) || !(p < 1.0))
      throw std::invalid_argument("QuantileGrid: levels must be strictly increasing inside (0, 1)");
    prev = p;
  }
}

QuantileGrid QuantileGrid::equidistant(int n) {
  if (n < 1) throw std::invalid_argument("QuantileGrid: need at least one level");
  std::vector<double> levels(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) levels[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) / (n + 1);
  return QuantileGrid(levels);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_inv_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_inv_cdf: argument must lie strictly inside (0, 1)");

  // Acklam's piecewise rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley refinement against the exact CDF.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double student_t3_cdf(double x) {
  double s = x / std::numbers::sqrt3;
  return 0.5 + (s / (1.0 + s * s) + std::atan(s)) / std::numbers::pi;
}

double student_t3_inv_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("student_t3_inv_cdf: argument must lie strictly inside (0, 1)");
  double lo = -1.0, hi = 1.0;
  while (student_t3_cdf(lo) > p) lo *= 2.0;
  while (student_t3_cdf(hi) < p) hi *= 2.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (student_t3_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double error_inv_cdf(ErrorDist dist, double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("error_inv_cdf: argument must lie strictly inside (0, 1)");
  switch (dist) {
    case ErrorDist::std_normal: return normal_inv_cdf(p);
    case ErrorDist::student_t3: return student_t3_inv_cdf(p);
    case ErrorDist::uniform_0_2: return 2.0 * p;
  }
  throw std::invalid_argument("error_inv_cdf: unknown distribution");
}

Vector true_quantile_coefficients(const Vector& beta, const Vector& vartheta,
                                  const std::function<double(double)>& inv_cdf, double p) {
  if (beta.size() != vartheta.size())
    throw std::invalid_argument("true_quantile_coefficients: beta and vartheta sizes differ");
  if (vartheta.size() == 0 || vartheta[0] != 1.0)
    throw std::invalid_argument("true_quantile_coefficients: intercept entry of vartheta must be 1");
  for (Eigen::Index j = 0; j < vartheta.size(); ++j)
    if (vartheta[j] != 0.0 && vartheta[j] != 1.0)
      throw std::invalid_argument("true_quantile_coefficients: vartheta entries must be 0 or 1");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("true_quantile_coefficients: level must lie strictly inside (0, 1)");
  return beta + vartheta * inv_cdf(p);
}

}  // namespace hsbqr
