#include "orff/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "orff/linalg.hpp"
#include "orff/rng.hpp"

namespace orff::spectral {

Matrix factor_psd(const Matrix& A) {
  if (A.rows() != A.cols()) throw InvalidParameter("matrix must be square");
  if (!is_symmetric(A, 1e-8)) {
    throw InvalidParameter("matrix must be symmetric to factor");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (A + A.transpose()));
  const Vector& evals = eig.eigenvalues();  // ascending
  const double norm = evals.size() > 0 ? evals.cwiseAbs().maxCoeff() : 0.0;
  const double cut = 1e-12 * norm;
  Index rank = 0;
  for (Index i = 0; i < evals.size(); ++i) {
    if (evals(i) > cut) ++rank;
  }
  Matrix B(A.rows(), rank);
  for (Index k = 0; k < rank; ++k) {
    const Index src = evals.size() - 1 - k;  // descending order
    Vector col = eig.eigenvectors().col(src) * std::sqrt(evals(src));
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
    B.col(k) = col;
  }
  return B;
}

SpectralPair make_spectral_pair(const KernelSpec& spec) {
  SpectralPair pair;
  pair.spec = spec;
  switch (spec.family) {
    case Family::Decomposable:
      pair.coupling_factor = factor_psd(spec.A);
      pair.pprime = pair.coupling_factor.cols();
      break;
    case Family::CurlFree:
      pair.pprime = 1;
      break;
    case Family::DivFree:
      pair.pprime = spec.d;
      break;
  }
  if (pair.pprime < 1) {
    throw InvalidParameter("coupling matrix A has rank zero");
  }
  return pair;
}

FrequencyDraw sample_frequencies(Index D, Index d, double sigma,
                                 std::uint64_t seed) {
  if (D < 1) throw InvalidParameter("feature count D must be >= 1");
  if (d < 1) throw InvalidParameter("input dimension d must be >= 1");
  if (!(sigma > 0.0)) throw InvalidParameter("bandwidth sigma must be > 0");
  FrequencyDraw draw;
  draw.seed = seed;
  draw.sigma = sigma;
  draw.omegas.resize(D, d);
  const std::uint64_t base = rng::substream(seed, rng::kFrequencies);
  detail::parallel_for(D, thread_budget(), [&](Index j) {
    rng::SplitMix64 gen(rng::substream(base, static_cast<std::uint64_t>(j)));
    for (Index k = 0; k < d; ++k) {
      draw.omegas(j, k) = rng::next_normal(gen) / sigma;
    }
  });
  return draw;
}

Matrix eval_A(const SpectralPair& pair, const Vector& omega) {
  if (omega.size() != pair.spec.d) {
    throw InvalidParameter("frequency length does not match input dimension");
  }
  switch (pair.spec.family) {
    case Family::Decomposable:
      return pair.spec.A;
    case Family::CurlFree:
      return omega * omega.transpose();
    case Family::DivFree:
      return omega.squaredNorm() * Matrix::Identity(pair.spec.p, pair.spec.p) -
             omega * omega.transpose();
  }
  throw InvalidParameter("unknown kernel family");
}

Matrix eval_B(const SpectralPair& pair, const Vector& omega) {
  if (omega.size() != pair.spec.d) {
    throw InvalidParameter("frequency length does not match input dimension");
  }
  switch (pair.spec.family) {
    case Family::Decomposable:
      return pair.coupling_factor;
    case Family::CurlFree:
      return omega;
    case Family::DivFree: {
      const double norm = omega.norm();
      if (norm == 0.0) return Matrix::Zero(pair.spec.p, pair.spec.p);
      const Vector unit = omega / norm;
      return norm * (Matrix::Identity(pair.spec.p, pair.spec.p) -
                     unit * unit.transpose());
    }
  }
  throw InvalidParameter("unknown kernel family");
}

}  // namespace orff::spectral
