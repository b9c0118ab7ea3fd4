#include "hsbqr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace hsbqr {

PriorKind parse_prior_kind(const std::string& name) {
  if (name == "horseshoe") return PriorKind::horseshoe;
  if (name == "lasso") return PriorKind::lasso;
  throw std::invalid_argument("unknown prior: " + name);
}

BetaBackend parse_beta_backend(const std::string& name) {
  if (name == "fast") return BetaBackend::fast;
  if (name == "cholesky") return BetaBackend::cholesky;
  if (name == "auto") return BetaBackend::auto_pick;
  throw std::invalid_argument("unknown backend: " + name);
}

std::string prior_kind_name(PriorKind kind) {
  switch (kind) {
    case PriorKind::horseshoe: return "horseshoe";
    case PriorKind::lasso: return "lasso";
  }
  throw std::logic_error("unreachable prior kind");
}

std::string beta_backend_name(BetaBackend backend) {
  switch (backend) {
    case BetaBackend::fast: return "fast";
    case BetaBackend::cholesky: return "cholesky";
    case BetaBackend::auto_pick: return "auto";
  }
  throw std::logic_error("unreachable backend");
}

void SamplerConfig::validate() const {
  if (n_iter <= 0) throw std::invalid_argument("SamplerConfig: n_iter must be positive");
  if (n_burn < 0 || n_burn >= n_iter)
    throw std::invalid_argument("SamplerConfig: n_burn must lie in [0, n_iter)");
  if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be at least 1");
  if (!(a_prior > 0.0) || !(b_prior > 0.0))
    throw std::invalid_argument("SamplerConfig: scale hyperparameters must be positive");
  if (!(residual_floor > 0.0))
    throw std::invalid_argument("SamplerConfig: residual_floor must be positive");
}

ChainState ChainState::initial(Eigen::Index t, Eigen::Index k) {
  ChainState s;
  s.beta = Vector::Zero(k);
  s.sigma2 = 1.0;
  s.z = Vector::Ones(t);
  s.lambda2 = Vector::Ones(k);
  s.nu2 = 1.0;
  s.lasso_u2 = 1.0;
  return s;
}

Vector PosteriorDraws::posterior_mean() const {
  if (betas.rows() == 0) throw std::logic_error("PosteriorDraws: no retained draws");
  return betas.colwise().mean();
}

Matrix PosteriorDraws::credible_interval(double mass) const {
  if (!(mass > 0.0) || !(mass < 1.0))
    throw std::invalid_argument("credible_interval: mass must lie strictly inside (0, 1)");
  if (betas.rows() == 0) throw std::logic_error("PosteriorDraws: no retained draws");
  const auto n = static_cast<std::size_t>(betas.rows());
  auto order_stat = [n](std::vector<double>& v, double p) {
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::min(std::max<std::size_t>(k, 1), n) - 1;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
  };
  Matrix out(betas.cols(), 2);
  std::vector<double> col(n);
  for (Eigen::Index j = 0; j < betas.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = betas(static_cast<Eigen::Index>(i), j);
    std::vector<double> tmp = col;
    out(j, 0) = order_stat(tmp, 0.5 * (1.0 - mass));
    tmp = col;
    out(j, 1) = order_stat(tmp, 0.5 * (1.0 + mass));
  }
  return out;
}

std::pair<double, double> latent_z_params(const QuantileSpec& q, double sigma2,
                                          double residual, double residual_floor) {
  double k2 = q.theta * q.theta + 2.0 * q.tau2;
  double sigma = std::sqrt(sigma2);
  double c = std::sqrt(k2) / std::max(std::abs(residual), residual_floor);
  double d = k2 / (sigma * q.tau2);
  return {c, d};
}

Vector update_latent_z(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                       const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                       const SamplerConfig& cfg) {
  Vector resid = y - X * state.beta;
  Vector z(resid.size());
  for (Eigen::Index t = 0; t < resid.size(); ++t) {
    auto [c, d] = latent_z_params(q, state.sigma2, resid[t], cfg.residual_floor);
    z[t] = 1.0 / draw_inverse_gaussian(rng, c, d);
  }
  return z;
}

std::pair<double, double> sigma2_params(const QuantileSpec& q, const SamplerConfig& cfg,
                                        const Eigen::Ref<const Vector>& y,
                                        const Eigen::Ref<const Matrix>& X,
                                        const Vector& beta, const Vector& z) {
  double shape = cfg.a_prior + 1.5 * static_cast<double>(y.size());
  Vector resid = y - X * beta - q.theta * z;
  double rate = cfg.b_prior + z.sum();
  for (Eigen::Index t = 0; t < z.size(); ++t)
    rate += resid[t] * resid[t] / (2.0 * z[t] * q.tau2);
  return {shape, rate};
}

double update_sigma2(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                     const SamplerConfig& cfg) {
  auto [shape, rate] = sigma2_params(q, cfg, y, X, state.beta, state.z);
  return draw_inverse_gamma(rng, shape, rate);
}

StructuredGaussian coefficient_draw_inputs(const ChainState& state,
                                           const Eigen::Ref<const Matrix>& X,
                                           const Eigen::Ref<const Vector>& y,
                                           const QuantileSpec& q, const SamplerConfig& cfg) {
  double sigma = std::sqrt(state.sigma2);
  Vector sqrt_u = (q.tau2 * sigma * state.z.array()).rsqrt();
  StructuredGaussian sg;
  sg.Phi = sqrt_u.asDiagonal() * X;
  sg.alpha = sqrt_u.cwiseProduct(y - q.theta * state.z);
  sg.D = state.nu2 * state.lambda2;
  if (!cfg.shrink_intercept && sg.D.size() > 0) sg.D[0] = 1e6;
  return sg;
}

Vector update_beta(Rng& rng, const ChainState& state, const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                   const SamplerConfig& cfg) {
  StructuredGaussian sg = coefficient_draw_inputs(state, X, y, q, cfg);
  bool use_fast = cfg.backend == BetaBackend::fast ||
                  (cfg.backend == BetaBackend::auto_pick && X.cols() > X.rows());
  return use_fast ? sample_fast(rng, sg) : sample_cholesky(rng, sg);
}

namespace detail {

SliceStep slice_step(Rng& rng, double eta_old, double rate) {
  if (!(eta_old > 0.0)) throw std::invalid_argument("slice_step: eta must be positive");
  if (!(rate >= 0.0)) throw std::invalid_argument("slice_step: rate must be non-negative");
  double u = rng.uniform01() / (1.0 + eta_old);
  if (u <= 0.0) {
    // Unbounded slice; only reachable on a zero-probability uniform draw.
    return {u, rate > 0.0 ? draw_exponential(rng, rate) : eta_old};
  }
  double upper = (1.0 - u) / u;
  return {u, draw_truncated_exponential(rng, rate, upper)};
}

SliceStep global_slice_step(Rng& rng, double eta_old, double rate, Eigen::Index k) {
  if (!(eta_old > 0.0)) throw std::invalid_argument("global_slice_step: eta must be positive");
  if (!(rate >= 0.0))
    throw std::invalid_argument("global_slice_step: rate must be non-negative");
  if (k < 1) throw std::invalid_argument("global_slice_step: need at least one coefficient");
  double shape = 0.5 * (static_cast<double>(k) + 1.0);
  double u = rng.uniform01() / (1.0 + eta_old);
  if (u <= 0.0) return {u, draw_gamma(rng, shape, std::max(rate, 1e-300))};
  double upper = (1.0 - u) / u;
  return {u, draw_truncated_gamma(rng, shape, rate, upper)};
}

}  // namespace detail

void update_horseshoe_scales(Rng& rng, ChainState& state, bool skip_first) {
  const Eigen::Index j0 = skip_first ? 1 : 0;
  double nu = std::sqrt(state.nu2);
  for (Eigen::Index j = j0; j < state.lambda2.size(); ++j) {
    double mu = state.beta[j] / nu;
    double eta = 1.0 / state.lambda2[j];
    eta = detail::slice_step(rng, eta, 0.5 * mu * mu).eta;
    state.lambda2[j] = 1.0 / eta;
  }
  const Eigen::Index pooled_n = state.lambda2.size() - j0;
  if (pooled_n < 1) return;
  double pooled = 0.0;
  for (Eigen::Index j = j0; j < state.lambda2.size(); ++j)
    pooled += state.beta[j] * state.beta[j] / state.lambda2[j];
  double eta = detail::global_slice_step(rng, 1.0 / state.nu2, 0.5 * pooled, pooled_n).eta;
  state.nu2 = 1.0 / eta;
}

double draw_lasso_lambda2(Rng& rng, double beta_j, double u2) {
  double abs_b = std::max(std::abs(beta_j), 1e-10);
  double recip = draw_inverse_gaussian(rng, std::sqrt(u2) / abs_b, u2);
  return 1.0 / recip;
}

void update_lasso_scales(Rng& rng, ChainState& state, bool skip_first) {
  const Eigen::Index j0 = skip_first ? 1 : 0;
  const Eigen::Index n = state.lambda2.size() - j0;
  if (n < 1) return;
  for (Eigen::Index j = j0; j < state.lambda2.size(); ++j)
    state.lambda2[j] = draw_lasso_lambda2(rng, state.beta[j], state.lasso_u2);
  // Conditional Gamma update of the squared penalty.
  const double hyper_shape = 1.0, hyper_rate = 1.78;
  double shape = hyper_shape + static_cast<double>(n);
  double rate = hyper_rate + 0.5 * state.lambda2.tail(n).sum();
  state.lasso_u2 = draw_gamma(rng, shape, rate);
}

namespace {

void check_finite_state(bool ok, const char* which, int sweep) {
  if (ok) return;
  std::ostringstream msg;
  msg << "run_chain: " << which << " produced non-finite values at sweep " << sweep;
  throw std::runtime_error(msg.str());
}

}  // namespace

PosteriorDraws run_chain(Rng& rng, const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                         const SamplerConfig& cfg) {
  cfg.validate();
  if (X.rows() != y.size()) throw std::invalid_argument("run_chain: X rows and y length differ");
  if (X.cols() < 1) throw std::invalid_argument("run_chain: design has no columns");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("run_chain: non-finite design or response");

  ChainState state = ChainState::initial(X.rows(), X.cols());
  const int n_keep = (cfg.n_iter - cfg.n_burn + cfg.thin - 1) / cfg.thin;

  PosteriorDraws out;
  out.quantile = q;
  out.config = cfg;
  out.betas.resize(n_keep, X.cols());
  out.sigma2s.resize(n_keep);

  int kept = 0;
  for (int m = 0; m < cfg.n_iter; ++m) {
    state.z = update_latent_z(rng, state, X, y, q, cfg);
    check_finite_state(state.z.allFinite(), "latent weight update", m);

    state.sigma2 = update_sigma2(rng, state, X, y, q, cfg);
    check_finite_state(std::isfinite(state.sigma2) && state.sigma2 > 0.0,
                       "observation scale update", m);

    state.beta = update_beta(rng, state, X, y, q, cfg);
    check_finite_state(state.beta.allFinite(), "coefficient update", m);

    if (cfg.prior == PriorKind::horseshoe)
      update_horseshoe_scales(rng, state, !cfg.shrink_intercept);
    else
      update_lasso_scales(rng, state, !cfg.shrink_intercept);
    check_finite_state(state.lambda2.allFinite() && std::isfinite(state.nu2) &&
                           std::isfinite(state.lasso_u2),
                       "shrinkage scale update", m);

    if (m >= cfg.n_burn && (m - cfg.n_burn) % cfg.thin == 0) {
      out.betas.row(kept) = state.beta;
      out.sigma2s[kept] = state.sigma2;
      ++kept;
    }
  }
  return out;
}

double shrinkage_factor(double nu2, double lambda2_j, double col_sd, Eigen::Index t,
                        double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("shrinkage_factor: sigma2 must be positive");
  double g = static_cast<double>(t) / sigma2 * nu2 * col_sd * col_sd * lambda2_j;
  return 1.0 / (1.0 + g);
}

StandardizedFit fit_with_intercept(Rng& rng, const Eigen::Ref<const Matrix>& regressors,
                                   const Eigen::Ref<const Vector>& y, const QuantileSpec& q,
                                   const SamplerConfig& cfg, bool standardize) {
  const Eigen::Index t = regressors.rows(), k = regressors.cols();
  StandardizedFit fit;
  fit.col_mean = Vector::Zero(k);
  fit.col_sd = Vector::Ones(k);
  if (standardize) {
    fit.col_mean = regressors.colwise().mean();
    for (Eigen::Index j = 0; j < k; ++j) {
      double ss = (regressors.col(j).array() - fit.col_mean[j]).square().sum();
      double sd = std::sqrt(ss / std::max<Eigen::Index>(t - 1, 1));
      // Near-constant columns are left unscaled so the fit stays defined.
      fit.col_sd[j] = sd > 1e-12 ? sd : 1.0;
    }
  }

  Matrix design(t, k + 1);
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j)
    design.col(j + 1) = (regressors.col(j).array() - fit.col_mean[j]) / fit.col_sd[j];

  fit.draws = run_chain(rng, design, y, q, cfg);

  auto to_original = [&](const Vector& b) {
    Vector out(b.size());
    out[0] = b[0];
    for (Eigen::Index j = 1; j < b.size(); ++j) {
      out[j] = b[j] / fit.col_sd[j - 1];
      out[0] -= b[j] * fit.col_mean[j - 1] / fit.col_sd[j - 1];
    }
    return out;
  };
  fit.coefficients = to_original(fit.draws.posterior_mean());

  // Map every retained draw so the interval bounds are exact on the original
  // scale rather than a linearization.
  Matrix mapped(fit.draws.betas.rows(), fit.draws.betas.cols());
  for (Eigen::Index i = 0; i < fit.draws.betas.rows(); ++i)
    mapped.row(i) = to_original(fit.draws.betas.row(i).transpose());
  PosteriorDraws tmp = fit.draws;
  tmp.betas = std::move(mapped);
  Matrix ci = tmp.credible_interval(0.9);
  fit.ci_lower = ci.col(0);
  fit.ci_upper = ci.col(1);
  return fit;
}

void write_fit_summaries(const std::string& path, const std::vector<PosteriorDraws>& fits,
                         double ci_mass) {
  nlohmann::json root;
  root["format"] = "hsbqr-fit-summary-v1";
  root["fits"] = nlohmann::json::array();
  for (const auto& f : fits) {
    Vector mean = f.posterior_mean();
    Matrix ci = f.credible_interval(ci_mass);
    nlohmann::json item;
    item["quantile"] = f.quantile.p;
    item["config"] = {
        {"prior", f.config.prior == PriorKind::horseshoe ? "horseshoe" : "lasso"},
        {"backend", f.config.backend == BetaBackend::fast
                        ? "fast"
                        : (f.config.backend == BetaBackend::cholesky ? "cholesky" : "auto")},
        {"n_iter", f.config.n_iter},
        {"n_burn", f.config.n_burn},
        {"thin", f.config.thin},
        {"a_prior", f.config.a_prior},
        {"b_prior", f.config.b_prior},
        {"shrink_intercept", f.config.shrink_intercept},
    };
    item["ci_mass"] = ci_mass;
    item["posterior_mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    std::vector<double> lo(ci.rows()), hi(ci.rows());
    for (Eigen::Index j = 0; j < ci.rows(); ++j) {
      lo[static_cast<std::size_t>(j)] = ci(j, 0);
      hi[static_cast<std::size_t>(j)] = ci(j, 1);
    }
    item["ci_lower"] = lo;
    item["ci_upper"] = hi;
    item["sigma2_posterior_mean"] = f.sigma2s.mean();
    root["fits"].push_back(std::move(item));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_fit_summaries: cannot open " + path);
  out << root.dump(2) << "\n";
}

}  // namespace hsbqr
