#include "orff/kernels.hpp"

#include <cmath>

#include "orff/linalg.hpp"

namespace orff::kernels {

double gaussian_signature(const Vector& delta, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("bandwidth sigma must be > 0");
  return std::exp(-delta.squaredNorm() / (2.0 * sigma * sigma));
}

namespace {

Matrix signature_value(const KernelSpec& spec, const Vector& delta) {
  const double k0 = gaussian_signature(delta, spec.sigma);
  const double s2 = spec.sigma * spec.sigma;
  const double s4 = s2 * s2;
  switch (spec.family) {
    case Family::Decomposable:
      return k0 * spec.A;
    case Family::CurlFree:
      return k0 * (Matrix::Identity(spec.p, spec.p) / s2 -
                   delta * delta.transpose() / s4);
    case Family::DivFree: {
      const double diag =
          (static_cast<double>(spec.d) - 1.0) / s2 - delta.squaredNorm() / s4;
      return k0 * (delta * delta.transpose() / s4 +
                   diag * Matrix::Identity(spec.p, spec.p));
    }
  }
  throw InvalidParameter("unknown kernel family");
}

}  // namespace

SignatureMatrix signature(const KernelSpec& spec, const Vector& delta) {
  if (delta.size() != spec.d) {
    throw InvalidParameter("displacement length does not match input dimension");
  }
  return SignatureMatrix{signature_value(spec, delta), delta};
}

Matrix exact_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Z) {
  if (X.cols() != spec.d || Z.cols() != spec.d) {
    throw InvalidParameter("data column count does not match input dimension");
  }
  const Index n = X.rows();
  const Index m = Z.rows();
  const Index p = spec.p;
  Matrix gram(n * p, m * p);
  detail::parallel_for(n, thread_budget(), [&](Index i) {
    for (Index j = 0; j < m; ++j) {
      const Vector delta = X.row(i).transpose() - Z.row(j).transpose();
      gram.block(i * p, j * p, p, p) = signature_value(spec, delta);
    }
  });
  return gram;
}

}  // namespace orff::kernels
