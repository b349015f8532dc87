#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orff/features.hpp"
#include "orff/types.hpp"

namespace orff::learn {

/// Fitted ridge model f(x) = Phi(x)^T vec(Theta); Theta is (2D) x p'.
struct RidgeModel {
  features::FeatureMapHandle handle;
  Matrix Theta;
  double lambda = 0.0;

  Vector theta_flat() const {
    return Eigen::Map<const Vector>(Theta.data(), Theta.size());
  }
};

struct SolverConfig {
  enum class Method { Stein, CG, SGD, Dense };
  Method method = Method::CG;
  double tol = 1e-8;     // relative residual
  Index max_iter = 0;    // 0 = automatic
  double eta0 = 0.0;     // SGD base step, 0 = automatic
  Index epochs = 20;
  std::uint64_t seed = 0;
};

SolverConfig::Method method_from_string(const std::string& name);

/// All solvers target the same stationarity system
///   (sum_i Phi(x_i) Phi(x_i)^T + lambda I) theta = sum_i Phi(x_i) y_i.

/// Decomposable closed form.  With S = phi(X) phi(X)^T the 2D x 2D scalar
/// feature Gram, G = B^T B and C = sum_i phi(x_i) (B^T y_i)^T, solves the
/// Stein equation S Theta G + lambda Theta = C by double symmetric
/// eigendecomposition: Theta = U [ (U^T C V)_ij / (s_i g_j + lambda) ] V^T.
RidgeModel fit_stein(const features::FeatureMapHandle& handle, const Matrix& X,
                     const Matrix& Y, double lambda, double tol = 1e-8);

/// Conjugate gradient on the matrix-free normal equations; all families.
RidgeModel fit_cg(const features::FeatureMapHandle& handle, const Matrix& X,
                  const Matrix& Y, double lambda,
                  const SolverConfig& config = {});

/// Stochastic gradient descent over single samples with step schedule
/// eta_t = eta0 / (1 + eta0 (lambda/N) t); the per-sample regularizer
/// lambda/N keeps the stationary point identical to the other solvers.
RidgeModel fit_sgd(const features::FeatureMapHandle& handle, const Matrix& X,
                   const Matrix& Y, double lambda,
                   const SolverConfig& config = {});

/// Dense normal-equation solve through materialized feature matrices.
/// Oracle path: independent of the fast operators.
RidgeModel fit_dense(const features::FeatureMapHandle& handle, const Matrix& X,
                     const Matrix& Y, double lambda);

RidgeModel fit(const features::FeatureMapHandle& handle, const Matrix& X,
               const Matrix& Y, double lambda, const SolverConfig& config);

Vector predict(const RidgeModel& model, const Vector& x);
Matrix predict_batch(const RidgeModel& model, const Matrix& X);

/// Mean-form ridge objective (1/N)(sum_i |Phi(x_i)^T theta - y_i|^2
/// + lambda |theta|^2) and its exact gradient.
double ridge_objective(const features::FeatureMapHandle& handle,
                       const Matrix& X, const Matrix& Y, double lambda,
                       const Vector& theta);
Vector ridge_gradient(const features::FeatureMapHandle& handle,
                      const Matrix& X, const Matrix& Y, double lambda,
                      const Vector& theta);

/// Exact kernel baseline: f(x) = sum_i K(x, x_i) alpha_i with
/// (G + lambda N I) stacked(alpha) = stacked(Y).  Guarded to N p <= 20000.
struct ExactOVKModel {
  KernelSpec spec;
  Matrix Xtrain;
  Matrix alpha;  // N x p
  double lambda = 0.0;
};

ExactOVKModel fit_exact_ovk(const KernelSpec& spec, const Matrix& X,
                            const Matrix& Y, double lambda);
Vector predict(const ExactOVKModel& model, const Vector& x);
Matrix predict_batch(const ExactOVKModel& model, const Matrix& X);

/// Simplex class codes: p unit rows in dimension p-1 with zero sum and
/// pairwise inner products -1/(p-1).
struct SimplexCode {
  Matrix C;  // p x (p-1)
};

SimplexCode simplex_code(Index p);
Matrix encode(const SimplexCode& code, const std::vector<int>& labels);
std::vector<int> decode(const SimplexCode& code, const Matrix& scores);

}  // namespace orff::learn
