#ifndef HSBQR_QUANTILE_HPP
#define HSBQR_QUANTILE_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace hsbqr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Quantile level together with the asymmetric-Laplace mixture constants
//   theta = (1 - 2p) / (p (1 - p)),   tau2 = 2 / (p (1 - p)),
// which turn the check-loss likelihood into a conditionally Gaussian model
// with exponential latent weights.
struct QuantileSpec {
  double p;
  double theta;
  double tau2;
};

// Requires 0 < p < 1.
QuantileSpec quantile_constants(double p);

// Check loss rho_p(u) = u (p - I(u <= 0)).
inline double check_loss(double u, double p) {
  return u > 0.0 ? p * u : (p - 1.0) * u;
}

// Strictly increasing quantile levels inside (0, 1).
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<double> levels);

  // n levels at i / (n + 1); n = 19 gives 0.05, 0.10, ..., 0.95.
  static QuantileGrid equidistant(int n);

  const std::vector<double>& levels() const { return levels_; }
  int size() const { return static_cast<int>(levels_.size()); }
  double operator[](int i) const { return levels_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> levels_;
};

double normal_cdf(double x);

// Inverse standard normal CDF (Acklam's rational approximation polished with
// one Halley step on erfc), |error| well under 1e-12 on (0, 1).
double normal_inv_cdf(double p);

// Student t with 3 degrees of freedom; closed-form CDF and its inverse by
// bracketed bisection to 1e-12.
double student_t3_cdf(double x);
double student_t3_inv_cdf(double p);

// Error laws used by the simulation designs.
enum class ErrorDist { std_normal, student_t3, uniform_0_2 };

double error_inv_cdf(ErrorDist dist, double p);

// Coefficients of the p-th conditional quantile in a location-shift design:
// beta + vartheta * F^{-1}(p). vartheta entries must be 0 or 1 and the
// intercept entry vartheta[0] must be 1.
Vector true_quantile_coefficients(const Vector& beta, const Vector& vartheta,
                                  const std::function<double(double)>& inv_cdf, double p);

}  // namespace hsbqr

#endif
