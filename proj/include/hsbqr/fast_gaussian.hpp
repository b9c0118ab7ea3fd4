#ifndef HSBQR_FAST_GAUSSIAN_HPP
#define HSBQR_FAST_GAUSSIAN_HPP

#include <Eigen/Core>

#include "hsbqr/quantile.hpp"
#include "hsbqr/rng.hpp"

namespace hsbqr {

// Gaussian posterior N(mu, Sigma) in the standard conjugate form
//   Sigma = (Phi' Phi + D^{-1})^{-1},   mu = Sigma Phi' alpha,
// with Phi the T x K standardized design, D a positive prior-covariance
// diagonal and alpha the standardized response.
struct StructuredGaussian {
  Matrix Phi;
  Vector D;
  Vector alpha;
};

void validate(const StructuredGaussian& sg);

// O(T^2 K) draw: with u ~ N(0, D) and delta ~ N(0, I_T), solve the T x T
// system (Phi D Phi' + I_T) w = alpha - Phi u - delta and return
// u + D Phi' w. Exact for any K, and cheap precisely when K >> T.
Vector sample_fast(Rng& rng, const StructuredGaussian& sg);

// Same map with caller-supplied noise; zero noise returns the posterior mean.
Vector sample_fast_given_noise(const StructuredGaussian& sg, const Vector& u,
                               const Vector& delta);

// Reference O(K^3) draw from the K x K Cholesky factorization of
// Phi' Phi + D^{-1}.
Vector sample_cholesky(Rng& rng, const StructuredGaussian& sg);

Vector sample_cholesky_given_noise(const StructuredGaussian& sg, const Vector& z);

}  // namespace hsbqr

#endif
