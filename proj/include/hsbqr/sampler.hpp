#ifndef HSBQR_SAMPLER_HPP
#define HSBQR_SAMPLER_HPP

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "hsbqr/fast_gaussian.hpp"
#include "hsbqr/quantile.hpp"
#include "hsbqr/rng.hpp"

namespace hsbqr {

enum class PriorKind { horseshoe, lasso };
enum class BetaBackend { fast, cholesky, auto_pick };

PriorKind parse_prior_kind(const std::string& name);
BetaBackend parse_beta_backend(const std::string& name);
std::string prior_kind_name(PriorKind kind);
std::string beta_backend_name(BetaBackend backend);

struct SamplerConfig {
  PriorKind prior = PriorKind::horseshoe;
  BetaBackend backend = BetaBackend::auto_pick;
  int n_iter = 5000;
  int n_burn = 1000;
  int thin = 1;
  // Inverse-gamma hyperparameters of the observation-scale prior.
  double a_prior = 0.1;
  double b_prior = 0.1;
  // |residual| floor protecting the latent-weight location from division by zero.
  double residual_floor = 1e-10;
  // The intercept is shrunk like any coefficient unless exempted here.
  bool shrink_intercept = true;

  void validate() const;
};

// One sweep's worth of chain state. lasso_u2 is the squared lasso penalty
// hyperparameter; it idles at 1 under the horseshoe prior, as does nu2 under
// the lasso prior.
struct ChainState {
  Vector beta;
  double sigma2 = 1.0;
  Vector z;
  Vector lambda2;
  double nu2 = 1.0;
  double lasso_u2 = 1.0;

  static ChainState initial(Eigen::Index t, Eigen::Index k);
};

// Retained post-burn-in draws at one quantile level.
struct PosteriorDraws {
  QuantileSpec quantile{0.5, 0.0, 8.0};
  SamplerConfig config;
  Matrix betas;    // one retained draw per row
  Vector sigma2s;

  Vector posterior_mean() const;
  // Componentwise equal-tailed interval; column 0 lower, column 1 upper.
  Matrix credible_interval(double mass = 0.9) const;
};

// Location and rate of the inverse-Gaussian conditional of a latent weight's
// reciprocal, given the current residual and scale.
std::pair<double, double> latent_z_params(const QuantileSpec& q, double sigma2,
                                          double residual, double residual_floor = 1e-10);

// Shape and rate of the inverse-gamma conditional of the observation scale.
std::pair<double, double> sigma2_params(const QuantileSpec& q, const SamplerConfig& cfg,
                                        const Eigen::Ref<const Vector>& y,
                                        const Eigen::Ref<const Matrix>& X,
                                        const Vector& beta, const Vector& z);

Vector update_latent_z(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                       const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                       const SamplerConfig& cfg);

double update_sigma2(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                     const SamplerConfig& cfg);

// Whitened design, response and prior diagonal feeding the coefficient draw:
// Phi = sqrt(U) X and alpha = sqrt(U) (y - theta z) with observation weights
// U = diag(1 / (tau2 z_i sigma)), D = nu2 * lambda2 (intercept entry widened
// when exempt from shrinkage).
StructuredGaussian coefficient_draw_inputs(const ChainState& state,
                                           const Eigen::Ref<const Matrix>& X,
                                           const Eigen::Ref<const Vector>& y,
                                           const QuantileSpec& q, const SamplerConfig& cfg);

Vector update_beta(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                   const SamplerConfig& cfg);

namespace detail {
// One slice-sampling step for a local scale reciprocal eta with target
// density proportional to exp(-rate * eta) / (1 + eta). The half-Cauchy
// prior's eta^{-1/2} exactly cancels the single-coefficient likelihood's
// eta^{1/2}, which is what makes the exponential slice valid here.
struct SliceStep {
  double slice_u;
  double eta;
};
SliceStep slice_step(Rng& rng, double eta_old, double rate);

// Slice step for the global scale reciprocal eta = 1/nu^2, which pools k
// coefficients: target proportional to eta^{(k-1)/2} exp(-rate * eta) /
// (1 + eta), so the conditional on the slice is a truncated Gamma((k+1)/2,
// rate) rather than a truncated exponential.
SliceStep global_slice_step(Rng& rng, double eta_old, double rate, Eigen::Index k);
}  // namespace detail

// Local scales by slice sampling, then the global scale with the pooled
// rate. skip_first leaves the leading (intercept) scale out of both the
// local updates and the global pool, matching an unshrunk intercept.
void update_horseshoe_scales(Rng& rng, ChainState& state, bool skip_first = false);

// Bayesian-lasso local scales and the conditional update of the squared
// penalty under its Gamma(1, 1.78) hyperprior.
double draw_lasso_lambda2(Rng& rng, double beta_j, double u2);
void update_lasso_scales(Rng& rng, ChainState& state, bool skip_first = false);

PosteriorDraws run_chain(Rng& rng, const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                         const SamplerConfig& cfg);

// Posterior shrinkage weight 1 / (1 + T sigma^{-2} nu2 s_j^2 lambda2_j) of a
// coefficient with predictor standard deviation s_j; 0 means untouched, 1
// means fully shrunk to zero.
double shrinkage_factor(double nu2, double lambda2_j, double col_sd, Eigen::Index t,
                        double sigma2);

// Fit with a prepended intercept column; optionally center and scale the
// non-constant regressors for sampling and map the coefficient summaries back
// to the original scale.
struct StandardizedFit {
  PosteriorDraws draws;       // on the sampling (standardized) scale
  Vector coefficients;        // posterior mean on the original scale
  Vector ci_lower, ci_upper;  // equal-tailed 90% bounds on the original scale
  Vector col_mean, col_sd;    // per-regressor statistics used for sampling
};

StandardizedFit fit_with_intercept(Rng& rng, const Eigen::Ref<const Matrix>& regressors,
                                   const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                                   const SamplerConfig& cfg, bool standardize = true);

// Structured-text dump of per-quantile posterior summaries with a config echo.
void write_fit_summaries(const std::string& path, const std::vector<PosteriorDraws>& fits,
                         double ci_mass = 0.9);

}  // namespace hsbqr

#endif
