#ifndef HSBQR_TESTS_TEST_UTIL_HPP
#define HSBQR_TESTS_TEST_UTIL_HPP

// Self-contained statistical oracles for the test suites. Deliberately
// independent of the library internals so they can sit in judgment of them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// P(sup_t |B(t)| > lambda) for the Brownian bridge, i.e. the asymptotic
// Kolmogorov-Smirnov tail probability.
inline double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    s += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, s));
}

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample KS test of x against a continuous CDF.
inline KsResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return {d, kolmogorov_tail(d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)))};
}

// Two-sample KS test.
inline KsResult ks_test_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_test_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] <= y[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  double ne = std::sqrt(nx * ny / (nx + ny));
  return {d, kolmogorov_tail(d * (ne + 0.12 + 0.11 / ne))};
}

// Empirical p-quantile as a check-loss minimizer: sorted order statistic at
// ceil(n p).
inline double empirical_quantile(std::vector<double> y, double p) {
  if (y.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  std::sort(y.begin(), y.end());
  std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(y.size())));
  if (k == 0) k = 1;
  if (k > y.size()) k = y.size();
  return y[k - 1];
}

// Monte Carlo standard error of the mean of a correlated chain via batch
// means (20 batches).
inline double batch_means_se(const std::vector<double>& x, int n_batches = 20) {
  std::size_t n = x.size();
  std::size_t b = n / static_cast<std::size_t>(n_batches);
  if (b < 2) throw std::invalid_argument("batch_means_se: chain too short");
  std::vector<double> bm;
  for (int k = 0; k < n_batches; ++k) {
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(k) * b; i < static_cast<std::size_t>(k + 1) * b; ++i)
      s += x[i];
    bm.push_back(s / static_cast<double>(b));
  }
  return std::sqrt(variance(bm) / static_cast<double>(n_batches));
}

// Split-chain potential scale reduction factor of a single chain.
inline double split_rhat(const std::vector<double>& x) {
  std::size_t n = x.size() / 2;
  if (n < 4) throw std::invalid_argument("split_rhat: chain too short");
  std::vector<double> a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> b(x.end() - static_cast<std::ptrdiff_t>(n), x.end());
  double ma = mean(a), mb = mean(b);
  double w = 0.5 * (variance(a) + variance(b));
  double mm = 0.5 * (ma + mb);
  double bvar = static_cast<double>(n) * ((ma - mm) * (ma - mm) + (mb - mm) * (mb - mm));
  double var_plus = (static_cast<double>(n - 1) / static_cast<double>(n)) * w + bvar / static_cast<double>(n);
  if (w <= 0.0) return 1.0;
  return std::sqrt(var_plus / w);
}

// Simpson integration on a uniform grid given as sampled values.
inline double simpson(const std::vector<double>& f, double h) {
  if (f.size() < 3 || f.size() % 2 == 0) throw std::invalid_argument("simpson: need odd point count >= 3");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testutil

#endif
