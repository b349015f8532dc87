#pragma once

#include "orff/types.hpp"

namespace orff::kernels {

/// Signature of a matrix-valued shift-invariant kernel, K(x, z) = K0(x - z),
/// together with the displacement it was evaluated at.
struct SignatureMatrix {
  Matrix value;  // p x p, symmetric
  Vector delta;
};

/// Scalar Gaussian base, exp(-|delta|^2 / (2 sigma^2)).
double gaussian_signature(const Vector& delta, double sigma);

/// Closed-form signature K0(delta) of the kernel described by `spec`.
///
/// Decomposable:  k0(delta) A
/// Curl-free:     (I/s^2 - delta delta^T / s^4) k0(delta)
/// Div-free:      (delta delta^T / s^4 + ((d-1)/s^2 - |delta|^2/s^4) I) k0(delta)
///
/// The differential families are the analytic Hessian forms of the Gaussian
/// base; the unit tests gate them against finite differences.
SignatureMatrix signature(const KernelSpec& spec, const Vector& delta);

/// Dense block Gram matrix: block (i, j) = K0(x_i - z_j), size Np x Mp.
/// For X == Z the result is symmetric positive semi-definite.
Matrix exact_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Z);

}  // namespace orff::kernels
