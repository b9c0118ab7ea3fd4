#ifndef HSBQR_MC_LAB_HPP
#define HSBQR_MC_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hsbqr/quantile.hpp"
#include "hsbqr/sampler.hpp"

namespace hsbqr {

// Coefficient patterns for the simulation study. Each pattern is indexed by a
// width parameter t1; the reported dimension includes the intercept entry.
enum class DesignKind { sparse, dense, block };

// Error processes layered on the linear signal:
//   y1   iid standard normal
//   y2   iid t with 3 degrees of freedom
//   y3   (1 + x_1) * normal, scale grows with the first regressor
//   y4   normal + x_1 * uniform(0, 2)
enum class ErrorModel { y1, y2, y3, y4 };

DesignKind parse_design_kind(const std::string& name);
ErrorModel parse_error_model(const std::string& name);
std::string design_kind_name(DesignKind kind);
std::string error_model_name(ErrorModel model);

// Base coefficient vector, intercept first.
//   sparse: (1, 1, 1/2, 1/3, 1/4, 1/5), then 2*t1 zeros
//   dense:  1, then t1 entries of 0.85
//   block:  1, then 0.85 x t1, 0 x t1, 0.85 x t1
Vector make_beta(DesignKind kind, int t1);

// t rows drawn iid from N(0, S) with S_ij = 0.5^|i-j|. The first-order
// recursion x_j = 0.5 x_{j-1} + sqrt(0.75) e_j is the banded Cholesky factor
// of S applied to iid normals, so cost stays linear in k.
Matrix generate_design(Rng& rng, int t, int k);

struct DgpConfig {
  DesignKind design = DesignKind::sparse;
  ErrorModel error = ErrorModel::y1;
  int t1 = 200;        // pattern width; the coefficient dimension follows from it
  int t_total = 200;   // training block plus reserved holdout
  int holdout = 100;   // trailing observations scored out of sample
  int n_replications = 20;
  double noise_scale = 1.0;  // 0 gives the degenerate noiseless variant
  std::uint64_t seed = 1;

  int n_train() const { return t_total - holdout; }
  void validate() const;
};

// One simulated data set. x_train / x_test carry a leading ones column. The
// holdout block depends only on (seed, design, error), never on the
// replication index, so every replication is scored on the same test set.
struct DgpInstance {
  DgpConfig config;
  Vector beta_base;
  Vector vartheta;  // 0/1 indicator of the coordinates whose quantile shifts
  Matrix x_train;
  Vector y_train;
  Matrix x_test;
  Vector y_test;

  // Population coefficient vector of the p-th conditional quantile: the base
  // coefficients plus the error quantile function on the intercept and, for
  // y3 / y4, on the first regressor.
  Vector true_beta_of_p(double p) const;
};

DgpInstance simulate_dgp(const DgpConfig& config, int replication);

// Root mean coefficient bias: sqrt of the replication average of
// ||estimate - truth||^2. Inputs are per-replication vectors.
double rmcb(const std::vector<Vector>& estimates, const std::vector<Vector>& truths);

// Same aggregation applied to fitted values x_test * coefficients.
double rmsfe(const std::vector<Vector>& estimates, const std::vector<Vector>& truths,
             const Matrix& x_test);

struct McStudyConfig {
  DgpConfig dgp;
  std::vector<double> quantiles;   // strictly increasing, inside (0, 1)
  std::vector<PriorKind> priors;   // estimators to cross with the quantiles
  SamplerConfig sampler;           // prior field is overridden per estimator
  int n_threads = 1;               // <= 0 defers to HSBQR_THREADS, then hardware
};

// Scores for one (estimator, quantile) cell. rmcb / rmsfe are root mean
// squares per coefficient and per holdout observation respectively, so cells
// are comparable across designs of different dimension. sq_bias /
// sq_forecast hold the raw per-replication squared norms behind the
// averages, with failed replications recorded as NaN and skipped.
struct McCell {
  PriorKind prior;
  double p = 0.5;
  double rmcb = 0.0;
  double rmsfe = 0.0;
  int n_ok = 0;
  std::vector<double> sq_bias;
  std::vector<double> sq_forecast;
};

struct McResult {
  McStudyConfig config;
  std::vector<McCell> cells;  // priors outer, quantiles inner
  std::vector<std::string> failures;

  const McCell& cell(PriorKind prior, double p) const;
};

// Runs the full cross of replications x estimators x quantiles. Every task
// draws its data and chain from streams keyed by (replication, estimator,
// quantile), so results do not depend on the thread count. A replication
// whose chain throws is logged into failures and dropped from that cell's
// averages rather than aborting the study.
McResult run_mc_study(const McStudyConfig& config);

}  // namespace hsbqr

#endif
