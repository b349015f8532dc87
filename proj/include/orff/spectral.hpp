#pragma once

#include <cstdint>

#include "orff/types.hpp"

namespace orff::spectral {

/// Spectral side of a kernel: the matrix factor A(omega) of the Gaussian
/// probability measure N(0, I/sigma^2), plus a factor B(omega) with
/// A(omega) = B(omega) B(omega)^T of width pprime.
///
///   decomposable:  A(omega) = A            B = fixed factor of A, pprime = rank(A)
///   curl-free:     A(omega) = w w^T        B = w,                 pprime = 1
///   div-free:      A(omega) = I|w|^2-ww^T  B = |w|(I - u u^T),    pprime = d
///
/// The div-free factor uses the normalized direction u = w/|w|; the projector
/// identity (|w|(I - u u^T))^2 = I|w|^2 - w w^T makes a per-sample numerical
/// decomposition unnecessary.  B(0) = 0.
struct SpectralPair {
  KernelSpec spec;
  Index pprime = 0;
  Matrix coupling_factor;  // p x pprime, decomposable only
};

SpectralPair make_spectral_pair(const KernelSpec& spec);

/// i.i.d. frequencies from N(0, I/sigma^2), one substream per row so the
/// draw is independent of evaluation order.  Bit-reproducible from the seed.
struct FrequencyDraw {
  Matrix omegas;  // D x d
  std::uint64_t seed = 0;
  double sigma = 1.0;
};

FrequencyDraw sample_frequencies(Index D, Index d, double sigma,
                                 std::uint64_t seed);

Matrix eval_A(const SpectralPair& pair, const Vector& omega);
Matrix eval_B(const SpectralPair& pair, const Vector& omega);

/// B with B B^T = A and numerical-rank column count (eigenvalues above
/// 1e-12 |A| kept, descending).  Eigenvector signs are canonicalized so the
/// factor is reproducible.
Matrix factor_psd(const Matrix& A);

}  // namespace orff::spectral
