#pragma once

#include <cstdint>
#include <vector>

#include "orff/spectral.hpp"
#include "orff/types.hpp"

namespace orff::features {

/// Sampled feature map.  The real layout stacks, per frequency j, a cosine
/// block cos<x,w_j> B(w_j)^T and a sine block sin<x,w_j> B(w_j)^T, scaled by
/// 1/sqrt(D).  Coefficients are handled as a (2D) x p' matrix Theta whose
/// first D rows belong to the cosine blocks and last D rows to the sine
/// blocks; flat vectors are its column-major vec.
struct FeatureMapHandle {
  spectral::SpectralPair pair;
  spectral::FrequencyDraw draw;
  Index D = 0;
  Index pprime = 0;
  double normalization = 1.0;  // 1/sqrt(D)
  std::uint64_t seed = 0;

  Index feature_dim() const { return 2 * D * pprime; }
  const KernelSpec& spec() const { return pair.spec; }
};

FeatureMapHandle build_feature_map(const KernelSpec& spec, Index D,
                                   std::uint64_t seed);

/// Dense feature matrix, (2 D p') x p.  Row r + c*2D carries the c-th column
/// of B(w_j): cos for r = j < D, sin for r = D + j.
Matrix feature_matrix(const FeatureMapHandle& handle, const Vector& x);

/// Monte-Carlo kernel estimate (1/D) sum_j cos<x-z, w_j> A(w_j); equals
/// feature_matrix(x)^T feature_matrix(z) and depends on x, z only through
/// x - z.
Matrix approx_kernel(const FeatureMapHandle& handle, const Vector& x,
                     const Vector& z);

/// Matrix-free realizations of the feature map:
///   apply    P_x      theta -> Phi(x)^T theta          (prediction)
///   adjoint  P_x^*    y     -> Phi(x) y
///   normal   P_X^*P_X theta -> sum_i Phi(x_i) Phi(x_i)^T theta
///
/// Per-point costs: decomposable O(D p' + p p'), curl-free O(D p), div-free
/// O(D p) through the scale-plus-rank-one structure of B(w).  `normal` runs
/// over fixed row blocks combined by a deterministic pairwise tree, so the
/// result does not depend on the thread count.
class FastOperator {
 public:
  explicit FastOperator(FeatureMapHandle handle);

  const FeatureMapHandle& handle() const { return handle_; }

  Vector apply(const Vector& x, const Vector& theta) const;
  Vector adjoint(const Vector& x, const Vector& y) const;
  Vector normal(const Matrix& X, const Vector& theta) const;

  /// Row-wise apply over a dataset, N x p.
  Matrix predict_batch(const Matrix& X, const Vector& theta) const;
  /// sum_i Phi(x_i) y_i, flat (2 D p').
  Vector adjoint_sum(const Matrix& X, const Matrix& Y) const;

  // Block kernels shared with the solvers; Tc/Ts are cos/sin of Xb * W^T.
  Matrix block_predict(const Matrix& Tc, const Matrix& Ts,
                       const Matrix& Theta) const;
  Matrix block_adjoint_sum(const Matrix& Tc, const Matrix& Ts,
                           const Matrix& Yb) const;

 private:
  FeatureMapHandle handle_;
  Vector omega_norms_;  // |w_j|, curl/div fast paths
};

/// Normal-equation workspace bound to one dataset: caches the per-block
/// cos/sin tables when they fit in memory, which makes repeated `normal`
/// calls (conjugate gradient) cheap.
class NormalEquations {
 public:
  NormalEquations(const FastOperator& op, const Matrix& X);

  Vector normal(const Vector& theta) const;
  Vector adjoint_sum(const Matrix& Y) const;
  Matrix predict(const Vector& theta) const;
  Index rows() const { return X_.rows(); }

 private:
  struct Block {
    Index row0 = 0;
    Index rows = 0;
    Matrix Tc, Ts;  // empty when not cached
  };
  void block_trig(const Block& b, Matrix& Tc, Matrix& Ts) const;

  const FastOperator& op_;
  Matrix X_;
  std::vector<Block> blocks_;
  bool cached_ = false;
};

}  // namespace orff::features
