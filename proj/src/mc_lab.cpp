#include "hsbqr/mc_lab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hsbqr/parallel.hpp"
#include "hsbqr/rng.hpp"

namespace hsbqr {

namespace {

constexpr std::uint64_t kHoldoutTag = 0x484f4c44;  // holdout data stream
constexpr std::uint64_t kTrainTag = 0x5452414e;    // per-replication training stream
constexpr std::uint64_t kChainTag = 0x4348414e;    // per-task sampler stream

}  // namespace

DesignKind parse_design_kind(const std::string& name) {
  if (name == "sparse") return DesignKind::sparse;
  if (name == "dense") return DesignKind::dense;
  if (name == "block") return DesignKind::block;
  throw std::invalid_argument("unknown design pattern: " + name);
}

ErrorModel parse_error_model(const std::string& name) {
  if (name == "y1" || name == "gauss") return ErrorModel::y1;
  if (name == "y2" || name == "t3") return ErrorModel::y2;
  if (name == "y3" || name == "hetero") return ErrorModel::y3;
  if (name == "y4" || name == "mixed") return ErrorModel::y4;
  throw std::invalid_argument("unknown error model: " + name);
}

std::string design_kind_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::sparse: return "sparse";
    case DesignKind::dense: return "dense";
    case DesignKind::block: return "block";
  }
  throw std::logic_error("unreachable design kind");
}

std::string error_model_name(ErrorModel model) {
  switch (model) {
    case ErrorModel::y1: return "y1";
    case ErrorModel::y2: return "y2";
    case ErrorModel::y3: return "y3";
    case ErrorModel::y4: return "y4";
  }
  throw std::logic_error("unreachable error model");
}

Vector make_beta(DesignKind kind, int t1) {
  if (t1 < 1) throw std::invalid_argument("pattern width must be positive");
  switch (kind) {
    case DesignKind::sparse: {
      Vector b = Vector::Zero(6 + 2 * t1);
      b[0] = 1.0;
      b[1] = 1.0;
      b[2] = 1.0 / 2.0;
      b[3] = 1.0 / 3.0;
      b[4] = 1.0 / 4.0;
      b[5] = 1.0 / 5.0;
      return b;
    }
    case DesignKind::dense: {
      Vector b = Vector::Constant(1 + t1, 0.85);
      b[0] = 1.0;
      return b;
    }
    case DesignKind::block: {
      Vector b = Vector::Zero(1 + 3 * t1);
      b[0] = 1.0;
      b.segment(1, t1).setConstant(0.85);
      b.segment(1 + 2 * t1, t1).setConstant(0.85);
      return b;
    }
  }
  throw std::logic_error("unreachable design kind");
}

Matrix generate_design(Rng& rng, int t, int k) {
  if (t < 1 || k < 1) throw std::invalid_argument("design dimensions must be positive");
  const double rho = 0.5;
  const double innov = std::sqrt(1.0 - rho * rho);
  Matrix x(t, k);
  for (int i = 0; i < t; ++i) {
    x(i, 0) = rng.normal();
    for (int j = 1; j < k; ++j) x(i, j) = rho * x(i, j - 1) + innov * rng.normal();
  }
  return x;
}

void DgpConfig::validate() const {
  if (t1 < 1) throw std::invalid_argument("pattern width must be positive");
  if (holdout < 0) throw std::invalid_argument("holdout size must be nonnegative");
  if (t_total <= holdout) throw std::invalid_argument("sample size must exceed the holdout");
  if (n_replications < 1) throw std::invalid_argument("need at least one replication");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be nonnegative");
}

Vector DgpInstance::true_beta_of_p(double p) const {
  Vector out = beta_base;
  const double s = config.noise_scale;
  switch (config.error) {
    case ErrorModel::y1:
      out[0] += s * error_inv_cdf(ErrorDist::std_normal, p);
      break;
    case ErrorModel::y2:
      out[0] += s * error_inv_cdf(ErrorDist::student_t3, p);
      break;
    case ErrorModel::y3: {
      double q = s * error_inv_cdf(ErrorDist::std_normal, p);
      out[0] += q;
      out[1] += q;
      break;
    }
    case ErrorModel::y4:
      out[0] += s * error_inv_cdf(ErrorDist::std_normal, p);
      out[1] += s * error_inv_cdf(ErrorDist::uniform_0_2, p);
      break;
  }
  return out;
}

namespace {

// Fills one block: ones column, regressors, signal plus the configured error.
void fill_block(Rng& rng, const DgpConfig& cfg, const Vector& beta, int n, Matrix& x, Vector& y) {
  const Eigen::Index k = beta.size();
  Matrix z = generate_design(rng, n, static_cast<int>(k) - 1);
  x.resize(n, k);
  x.col(0).setOnes();
  x.rightCols(k - 1) = z;
  y = x * beta;
  for (int i = 0; i < n; ++i) {
    double eps = 0.0;
    switch (cfg.error) {
      case ErrorModel::y1:
        eps = rng.normal();
        break;
      case ErrorModel::y2:
        eps = rng.normal() / std::sqrt(draw_chi_squared(rng, 3.0) / 3.0);
        break;
      case ErrorModel::y3:
        eps = (1.0 + z(i, 0)) * rng.normal();
        break;
      case ErrorModel::y4:
        eps = rng.normal() + z(i, 0) * (2.0 * rng.uniform01());
        break;
    }
    y[i] += cfg.noise_scale * eps;
  }
}

}  // namespace

DgpInstance simulate_dgp(const DgpConfig& config, int replication) {
  config.validate();
  if (replication < 0) throw std::invalid_argument("replication index must be nonnegative");

  DgpInstance inst;
  inst.config = config;
  inst.beta_base = make_beta(config.design, config.t1);
  inst.vartheta = Vector::Zero(inst.beta_base.size());
  inst.vartheta[0] = 1.0;
  if (config.error == ErrorModel::y3 || config.error == ErrorModel::y4) inst.vartheta[1] = 1.0;

  // The holdout stream ignores the replication index, so the test block is
  // reproduced bit for bit by every replication of the same configuration.
  if (config.holdout > 0) {
    Rng holdout_rng(config.seed, substream(kHoldoutTag));
    fill_block(holdout_rng, config, inst.beta_base, config.holdout, inst.x_test, inst.y_test);
  } else {
    inst.x_test.resize(0, inst.beta_base.size());
    inst.y_test.resize(0);
  }
  Rng train_rng(config.seed, substream(kTrainTag, static_cast<std::uint64_t>(replication)));
  fill_block(train_rng, config, inst.beta_base, config.n_train(), inst.x_train, inst.y_train);
  return inst;
}

double rmcb(const std::vector<Vector>& estimates, const std::vector<Vector>& truths) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw std::invalid_argument("estimate and truth lists must align");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size())
      throw std::invalid_argument("estimate and truth dimensions must align");
    acc += (estimates[i] - truths[i]).squaredNorm();
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

double rmsfe(const std::vector<Vector>& estimates, const std::vector<Vector>& truths,
             const Matrix& x_test) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw std::invalid_argument("estimate and truth lists must align");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != x_test.cols() || truths[i].size() != x_test.cols())
      throw std::invalid_argument("coefficient dimension must match the holdout design");
    acc += (x_test * (estimates[i] - truths[i])).squaredNorm();
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

const McCell& McResult::cell(PriorKind prior, double p) const {
  for (const McCell& c : cells)
    if (c.prior == prior && std::abs(c.p - p) < 1e-12) return c;
  throw std::out_of_range("no study cell at the requested estimator and quantile");
}

McResult run_mc_study(const McStudyConfig& config) {
  config.dgp.validate();
  config.sampler.validate();
  QuantileGrid grid(config.quantiles);  // validates ordering and range
  if (config.priors.empty()) throw std::invalid_argument("need at least one estimator");
  for (std::size_t i = 0; i < config.priors.size(); ++i)
    for (std::size_t j = i + 1; j < config.priors.size(); ++j)
      if (config.priors[i] == config.priors[j])
        throw std::invalid_argument("estimator list must not repeat");

  const int n_p = static_cast<int>(config.priors.size());
  const int n_q = grid.size();
  const int n_r = config.dgp.n_replications;
  const int n_tasks = n_p * n_q * n_r;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> sq_bias(static_cast<std::size_t>(n_tasks), nan);
  std::vector<double> sq_forecast(static_cast<std::size_t>(n_tasks), nan);
  std::vector<std::string> errors(static_cast<std::size_t>(n_tasks));

  auto run_task = [&](int idx) {
    const int rep = idx / (n_p * n_q);
    const int pi = (idx / n_q) % n_p;
    const int qi = idx % n_q;
    try {
      DgpInstance inst = simulate_dgp(config.dgp, rep);
      SamplerConfig cfg = config.sampler;
      cfg.prior = config.priors[pi];
      QuantileSpec q = quantile_constants(grid[qi]);
      Rng rng(config.dgp.seed,
              substream(kChainTag, static_cast<std::uint64_t>(rep),
                        static_cast<std::uint64_t>(pi) * 4096 + static_cast<std::uint64_t>(qi)));
      StandardizedFit fit = fit_with_intercept(
          rng, inst.x_train.rightCols(inst.x_train.cols() - 1), inst.y_train, q, cfg);
      Vector diff = fit.coefficients - inst.true_beta_of_p(grid[qi]);
      sq_bias[static_cast<std::size_t>(idx)] = diff.squaredNorm();
      sq_forecast[static_cast<std::size_t>(idx)] = (inst.x_test * diff).squaredNorm();
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(idx)] = e.what();
    }
  };
  parallel_for(n_tasks, resolve_threads(config.n_threads), run_task);

  McResult out;
  out.config = config;
  out.cells.reserve(static_cast<std::size_t>(n_p * n_q));
  const double k_coef = static_cast<double>(make_beta(config.dgp.design, config.dgp.t1).size());
  const double n_hold = std::max(1, config.dgp.holdout);
  for (int pi = 0; pi < n_p; ++pi) {
    for (int qi = 0; qi < n_q; ++qi) {
      McCell cell;
      cell.prior = config.priors[pi];
      cell.p = grid[qi];
      cell.sq_bias.assign(static_cast<std::size_t>(n_r), nan);
      cell.sq_forecast.assign(static_cast<std::size_t>(n_r), nan);
      double acc_b = 0.0, acc_f = 0.0;
      for (int rep = 0; rep < n_r; ++rep) {
        const int idx = (rep * n_p + pi) * n_q + qi;
        const double sb = sq_bias[static_cast<std::size_t>(idx)];
        if (std::isfinite(sb)) {
          cell.sq_bias[static_cast<std::size_t>(rep)] = sb;
          cell.sq_forecast[static_cast<std::size_t>(rep)] =
              sq_forecast[static_cast<std::size_t>(idx)];
          acc_b += sb;
          acc_f += sq_forecast[static_cast<std::size_t>(idx)];
          ++cell.n_ok;
        } else {
          out.failures.push_back("replication " + std::to_string(rep) + " prior " +
                                 (config.priors[pi] == PriorKind::horseshoe ? "horseshoe" : "lasso") +
                                 " p " + std::to_string(grid[qi]) + ": " +
                                 errors[static_cast<std::size_t>(idx)]);
        }
      }
      // Report on the per-coordinate scale so scores are comparable across
      // designs of different dimension and holdout length.
      cell.rmcb = cell.n_ok > 0 ? std::sqrt(acc_b / (cell.n_ok * k_coef)) : nan;
      cell.rmsfe = cell.n_ok > 0 ? std::sqrt(acc_f / (cell.n_ok * n_hold)) : nan;
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace hsbqr
