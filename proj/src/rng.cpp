#include "hsbqr/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsbqr {

namespace {

// SplitMix64 step; used both to derive well-separated engine seeds from
// (seed, stream) pairs and to mix substream coordinates.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x) >> 32),
                    static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x) >> 32),
                    static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x) >> 32)};
  engine_.seed(seq);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

std::uint64_t substream(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t x = a;
  std::uint64_t h = splitmix64(x);
  x ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= splitmix64(x);
  x ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return splitmix64(x);
}

double draw_standard_normal(Rng& rng) { return rng.normal(); }

double draw_exponential(Rng& rng, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("draw_exponential: rate must be positive");
  return -std::log1p(-rng.uniform01()) / rate;
}

double draw_truncated_exponential(Rng& rng, double rate, double upper) {
  if (!(rate >= 0.0)) throw std::invalid_argument("draw_truncated_exponential: rate must be non-negative");
  if (!(upper > 0.0)) throw std::invalid_argument("draw_truncated_exponential: upper must be positive");
  if (!std::isfinite(upper)) {
    if (rate == 0.0)
      throw std::invalid_argument("draw_truncated_exponential: rate 0 with unbounded support");
    return draw_exponential(rng, rate);
  }
  double v = rng.uniform01();
  // Inverse CDF x = -log(1 - v (1 - e^{-rate upper})) / rate, written with
  // expm1/log1p so tiny rate*upper stays accurate; in that regime the
  // conditional law is uniform on (0, upper).
  double ru = rate * upper;
  if (ru < 1e-12) return v * upper;
  double x = -std::log1p(v * std::expm1(-ru)) / rate;
  return x < upper ? x : upper * (1.0 - 1e-16);
}

double draw_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("draw_gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost the shape and correct with a uniform power.
    double g = draw_gamma(rng, shape + 1.0, 1.0);
    double u = 1.0 - rng.uniform01();  // (0, 1]
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = 1.0 - rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double draw_chi_squared(Rng& rng, double dof) {
  return draw_gamma(rng, 0.5 * dof, 0.5);
}

double log_reg_gamma_p(double shape, double x) {
  if (!(shape > 0.0)) throw std::invalid_argument("log_reg_gamma_p: shape must be positive");
  if (std::isnan(x)) throw std::invalid_argument("log_reg_gamma_p: x is NaN");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  double log_pre = shape * std::log(x) - x - std::lgamma(shape);
  if (x < shape + 1.0) {
    // Lower series: P = pre * sum, sum = 1/a + x/(a(a+1)) + ... stays O(1).
    double ap = shape, del = 1.0 / shape, sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (del < sum * 1e-17) break;
    }
    return log_pre + std::log(sum);
  }
  // Upper continued fraction (modified Lentz) for Q, then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - shape, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - shape);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  // In this branch x >= shape + 1, so Q <= 1/2 and the complement is safe.
  double log_q = log_pre + std::log(h);
  return std::log1p(-std::exp(log_q));
}

double draw_truncated_gamma(Rng& rng, double shape, double rate, double upper) {
  if (!(shape > 0.0)) throw std::invalid_argument("draw_truncated_gamma: shape must be positive");
  if (!(rate >= 0.0))
    throw std::invalid_argument("draw_truncated_gamma: rate must be nonnegative");
  if (!(upper > 0.0)) throw std::invalid_argument("draw_truncated_gamma: bound must be positive");
  if (!std::isfinite(upper)) {
    if (rate == 0.0)
      throw std::invalid_argument("draw_truncated_gamma: zero rate needs a finite bound");
    return draw_gamma(rng, shape, rate);
  }
  double u = rng.uniform01();
  if (u < 0x1.0p-53) u = 0x1.0p-53;
  if (rate == 0.0) return upper * std::pow(u, 1.0 / shape);

  // Invert log F(x) = log P(shape, rate x) at log u + log F(upper); bisection
  // against the monotone log CDF is immune to tail underflow.
  double target = std::log(u) + log_reg_gamma_p(shape, rate * upper);
  double lo = 0.0, hi = upper;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (log_reg_gamma_p(shape, rate * mid) < target ? lo : hi) = mid;
  }
  return hi;
}

double draw_inverse_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("draw_inverse_gamma: shape and rate must be positive");
  return 1.0 / draw_gamma(rng, shape, rate);
}

double draw_inverse_gaussian(Rng& rng, double location, double rate) {
  if (!(location > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("draw_inverse_gaussian: location and rate must be positive");
  double y = rng.normal();
  y = y * y;
  double w = location * y;
  // Smaller root of the transform quadratic, x = c (1 + (w - s) / (2 d)) with
  // s = sqrt(w (4 d + w)), written subtraction-free so extreme locations do
  // not suffer catastrophic cancellation.
  double s = std::sqrt(w * (4.0 * rate + w));
  double x = w == 0.0 ? location : 4.0 * location * rate * w / ((s + w) * (s + w));
  double u = rng.uniform01();
  if (u <= location / (location + x)) return x;
  return location * location / x;
}

}  // namespace hsbqr
