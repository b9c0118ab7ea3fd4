#ifndef HSBQR_RNG_HPP
#define HSBQR_RNG_HPP

#include <cstdint>
#include <random>

namespace hsbqr {

// Seeded random stream. Two handles built from the same (seed, stream) pair
// reproduce the same draw sequence; distinct stream ids give statistically
// independent streams, which is how parallel chains and quantile fits stay
// reproducible regardless of scheduling. All variate transforms below are
// implemented on top of raw 64-bit output, so sequences do not depend on
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method; the rejected companion
  // draw is cached, so consumption of the underlying stream varies but stays
  // deterministic.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes task coordinates into a stream id for Rng, so that per-replication,
// per-quantile, per-origin work can be assigned non-colliding streams.
std::uint64_t substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

double draw_standard_normal(Rng& rng);

// Exponential with the given rate (mean 1/rate).
double draw_exponential(Rng& rng, double rate);

// Exponential with the given rate conditioned on (0, upper). upper may be
// +infinity, and a vanishing rate degrades to uniform on (0, upper).
double draw_truncated_exponential(Rng& rng, double rate, double upper);

// Gamma with density x^{shape-1} e^{-rate x}; Marsaglia-Tsang squeeze.
double draw_gamma(Rng& rng, double shape, double rate);

double draw_chi_squared(Rng& rng, double dof);

// Log of the regularized lower incomplete gamma function P(shape, x), the
// CDF of a unit-rate gamma. Computed in log space so far-left-tail values
// stay meaningful long after P itself would underflow.
double log_reg_gamma_p(double shape, double x);

// Gamma(shape, rate) conditioned on (0, upper), by inverse-CDF bisection on
// the log CDF. upper may be +infinity (plain gamma draw); a zero rate with a
// finite bound degrades to the power-law density x^{shape-1} on (0, upper).
double draw_truncated_gamma(Rng& rng, double shape, double rate, double upper);

// Inverse gamma with density x^{-shape-1} e^{-rate/x}, mean rate/(shape-1).
double draw_inverse_gamma(Rng& rng, double shape, double rate);

// Inverse Gaussian with mean `location` and variance location^3/rate, via the
// Michael-Schucany-Haas transform with rejection.
double draw_inverse_gaussian(Rng& rng, double location, double rate);

}  // namespace hsbqr

#endif
