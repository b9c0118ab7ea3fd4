#include "hsbqr/fast_gaussian.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hsbqr {

namespace {

// Factorizes a symmetric positive definite matrix in place, escalating a
// diagonal jitter of 1e-10 .. 1e-6 times the mean diagonal before giving up.
Eigen::LLT<Matrix> robust_llt(Matrix m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double base = m.diagonal().mean();
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    Matrix bumped = m;
    bumped.diagonal().array() += jitter * base;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt;
  }
  std::ostringstream msg;
  msg << "fast_gaussian: Cholesky factorization failed after jitter escalation"
      << " (dim " << m.rows() << ", mean diagonal " << base << ", min diagonal "
      << m.diagonal().minCoeff() << ", max diagonal " << m.diagonal().maxCoeff() << ")";
  throw std::runtime_error(msg.str());
}

Vector standard_normals(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

void validate(const StructuredGaussian& sg) {
  if (sg.Phi.rows() != sg.alpha.size())
    throw std::invalid_argument("StructuredGaussian: Phi rows and alpha length differ");
  if (sg.Phi.cols() != sg.D.size())
    throw std::invalid_argument("StructuredGaussian: Phi columns and D length differ");
  if (sg.D.size() == 0)
    throw std::invalid_argument("StructuredGaussian: empty coefficient block");
  if (!(sg.D.minCoeff() > 0.0) || !sg.D.allFinite())
    throw std::invalid_argument("StructuredGaussian: D must be strictly positive and finite");
  if (!sg.Phi.allFinite() || !sg.alpha.allFinite())
    throw std::invalid_argument("StructuredGaussian: non-finite design or response");
}

Vector sample_fast_given_noise(const StructuredGaussian& sg, const Vector& u,
                               const Vector& delta) {
  validate(sg);
  const Eigen::Index t = sg.Phi.rows();
  if (u.size() != sg.D.size() || delta.size() != t)
    throw std::invalid_argument("sample_fast_given_noise: noise dimensions mismatch");

  Matrix m = Matrix::Zero(t, t);
  m.selfadjointView<Eigen::Lower>().rankUpdate(sg.Phi * sg.D.cwiseSqrt().asDiagonal());
  m.diagonal().array() += 1.0;

  Vector resid = sg.alpha - sg.Phi * u - delta;
  Vector w = robust_llt(m).solve(resid);
  return u + sg.D.asDiagonal() * (sg.Phi.transpose() * w);
}

Vector sample_fast(Rng& rng, const StructuredGaussian& sg) {
  validate(sg);
  Vector u = sg.D.cwiseSqrt().cwiseProduct(standard_normals(rng, sg.D.size()));
  Vector delta = standard_normals(rng, sg.Phi.rows());
  return sample_fast_given_noise(sg, u, delta);
}

Vector sample_cholesky_given_noise(const StructuredGaussian& sg, const Vector& z) {
  validate(sg);
  const Eigen::Index k = sg.Phi.cols();
  if (z.size() != k)
    throw std::invalid_argument("sample_cholesky_given_noise: noise dimension mismatch");

  Matrix a = Matrix::Zero(k, k);
  a.selfadjointView<Eigen::Lower>().rankUpdate(sg.Phi.transpose());
  a.diagonal() += sg.D.cwiseInverse();

  auto llt = robust_llt(a);
  Vector mean = llt.solve(sg.Phi.transpose() * sg.alpha);
  // Cov(L'^{-1} z) = (L L')^{-1}.
  return mean + llt.matrixU().solve(z);
}

Vector sample_cholesky(Rng& rng, const StructuredGaussian& sg) {
  validate(sg);
  return sample_cholesky_given_noise(sg, standard_normals(rng, sg.Phi.cols()));
}

}  // namespace hsbqr
