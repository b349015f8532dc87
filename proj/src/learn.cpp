#include "orff/learn.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "orff/kernels.hpp"
#include "orff/linalg.hpp"
#include "orff/rng.hpp"

namespace orff::learn {

namespace {

void check_training_data(const features::FeatureMapHandle& handle,
                         const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows()) {
    throw InvalidParameter("input and output row counts differ");
  }
  if (X.rows() < 1) throw InvalidParameter("training set is empty");
  if (X.cols() != handle.spec().d) {
    throw InvalidParameter("data column count does not match input dimension");
  }
  if (Y.cols() != handle.spec().p) {
    throw InvalidParameter("output column count does not match p");
  }
}

Matrix reshape_theta(const features::FeatureMapHandle& handle,
                     const Vector& theta) {
  return Eigen::Map<const Matrix>(theta.data(), 2 * handle.D, handle.pprime);
}

// Scalar cos/sin feature matrix of the handle's frequencies, 2D x N.
Matrix scalar_features(const features::FeatureMapHandle& handle,
                       const Matrix& X) {
  const Matrix angles = X * handle.draw.omegas.transpose();  // N x D
  Matrix phi(2 * handle.D, X.rows());
  phi.topRows(handle.D) =
      handle.normalization * angles.array().cos().matrix().transpose();
  phi.bottomRows(handle.D) =
      handle.normalization * angles.array().sin().matrix().transpose();
  return phi;
}

}  // namespace

SolverConfig::Method method_from_string(const std::string& name) {
  if (name == "stein") return SolverConfig::Method::Stein;
  if (name == "cg") return SolverConfig::Method::CG;
  if (name == "sgd") return SolverConfig::Method::SGD;
  if (name == "dense") return SolverConfig::Method::Dense;
  throw InvalidParameter("unknown solver '" + name +
                         "' (expected stein, cg, sgd or dense)");
}

RidgeModel fit_stein(const features::FeatureMapHandle& handle, const Matrix& X,
                     const Matrix& Y, double lambda, double tol) {
  check_training_data(handle, X, Y);
  if (handle.spec().family != Family::Decomposable) {
    throw InvalidParameter("stein solver supports only decomposable kernels");
  }
  if (lambda < 0.0) throw InvalidParameter("lambda must be >= 0");

  const Matrix& B = handle.pair.coupling_factor;
  const Matrix phi = scalar_features(handle, X);  // 2D x N
  const Matrix S = phi * phi.transpose();         // 2D x 2D
  const Matrix G = B.transpose() * B;             // p' x p'
  const Matrix C = phi * (Y * B);                 // 2D x p'

  Eigen::SelfAdjointEigenSolver<Matrix> eigS(S);
  Eigen::SelfAdjointEigenSolver<Matrix> eigG(G);
  const Vector& s = eigS.eigenvalues();
  const Vector& g = eigG.eigenvalues();

  Matrix M = eigS.eigenvectors().transpose() * C * eigG.eigenvectors();
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const double denom = s(i) * g(j) + lambda;
      if (std::abs(denom) < 1e-300) {
        throw ConvergenceFailure(
            "stein system is singular (lambda = 0 with rank-deficient Gram)",
            std::numeric_limits<double>::infinity());
      }
      M(i, j) /= denom;
    }
  }
  RidgeModel model;
  model.handle = handle;
  model.lambda = lambda;
  model.Theta = eigS.eigenvectors() * M * eigG.eigenvectors().transpose();

  const double residual =
      (S * model.Theta * G + lambda * model.Theta - C).norm();
  const double scale = std::max(C.norm(), 1e-300);
  if (residual > tol * scale) {
    throw ConvergenceFailure("stein solve residual above tolerance",
                             residual / scale);
  }
  return model;
}

RidgeModel fit_cg(const features::FeatureMapHandle& handle, const Matrix& X,
                  const Matrix& Y, double lambda, const SolverConfig& config) {
  check_training_data(handle, X, Y);
  if (lambda < 0.0) throw InvalidParameter("lambda must be >= 0");
  const features::FastOperator op(handle);
  const features::NormalEquations normal_eq(op, X);
  const Vector rhs = normal_eq.adjoint_sum(Y);
  const Index dim = handle.feature_dim();
  const double rhs_norm = rhs.norm();

  RidgeModel model;
  model.handle = handle;
  model.lambda = lambda;
  if (rhs_norm == 0.0) {
    model.Theta = Matrix::Zero(2 * handle.D, handle.pprime);
    return model;
  }

  const Index max_iter =
      config.max_iter > 0 ? config.max_iter : std::max<Index>(1000, 4 * dim);
  Vector theta = Vector::Zero(dim);
  Vector r = rhs;  // residual of (P*P + lambda I) theta = rhs at theta = 0
  Vector p = r;
  double rr = r.squaredNorm();
  double rel = std::sqrt(rr) / rhs_norm;
  for (Index it = 0; it < max_iter && rel > config.tol; ++it) {
    const Vector Ap = normal_eq.normal(p) + lambda * p;
    const double alpha = rr / p.dot(Ap);
    theta += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    rel = std::sqrt(rr) / rhs_norm;
  }
  if (rel > config.tol) {
    throw ConvergenceFailure("conjugate gradient did not reach tolerance", rel);
  }
  model.Theta = reshape_theta(handle, theta);
  return model;
}

RidgeModel fit_sgd(const features::FeatureMapHandle& handle, const Matrix& X,
                   const Matrix& Y, double lambda, const SolverConfig& config) {
  check_training_data(handle, X, Y);
  if (lambda < 0.0) throw InvalidParameter("lambda must be >= 0");
  const features::FastOperator op(handle);
  const Index n = X.rows();
  const double lambda_s = lambda / static_cast<double>(n);

  // trace of Phi(x)^T Phi(x) is the same for every x; its inverse is a
  // safe base step for the per-sample quadratic.
  double trace = 0.0;
  for (Index j = 0; j < handle.D; ++j) {
    const Vector w = handle.draw.omegas.row(j).transpose();
    trace += spectral::eval_A(handle.pair, w).trace();
  }
  trace /= static_cast<double>(handle.D);
  double eta0 = config.eta0;
  if (!(eta0 > 0.0)) eta0 = 1.0 / (trace + lambda_s + 1e-12);

  Vector theta = Vector::Zero(handle.feature_dim());
  const double initial_objective =
      ridge_objective(handle, X, Y, lambda, theta);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const std::uint64_t shuffle_base = rng::substream(config.seed, rng::kShuffle);
  std::uint64_t t = 0;
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    rng::SplitMix64 gen(
        rng::substream(shuffle_base, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[gen.next_below(i)]);
    }
    for (Index idx : order) {
      const Vector x = X.row(idx).transpose();
      const Vector residual = op.apply(x, theta) - Y.row(idx).transpose();
      const double eta = eta0 / (1.0 + eta0 * lambda_s * static_cast<double>(t));
      theta -= eta * (op.adjoint(x, residual) + lambda_s * theta);
      ++t;
    }
    const double objective = ridge_objective(handle, X, Y, lambda, theta);
    if (!std::isfinite(objective) || objective > 10.0 * initial_objective) {
      throw ConvergenceFailure("sgd diverged; reduce the base step", objective);
    }
  }
  RidgeModel model;
  model.handle = handle;
  model.lambda = lambda;
  model.Theta = reshape_theta(handle, theta);
  return model;
}

RidgeModel fit_dense(const features::FeatureMapHandle& handle, const Matrix& X,
                     const Matrix& Y, double lambda) {
  check_training_data(handle, X, Y);
  if (lambda < 0.0) throw InvalidParameter("lambda must be >= 0");
  const Index dim = handle.feature_dim();
  Matrix M = lambda * Matrix::Identity(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (Index i = 0; i < X.rows(); ++i) {
    const Matrix F = features::feature_matrix(handle, X.row(i).transpose());
    M.noalias() += F * F.transpose();
    rhs.noalias() += F * Y.row(i).transpose();
  }
  RidgeModel model;
  model.handle = handle;
  model.lambda = lambda;
  model.Theta = reshape_theta(handle, Eigen::LDLT<Matrix>(M).solve(rhs));
  return model;
}

RidgeModel fit(const features::FeatureMapHandle& handle, const Matrix& X,
               const Matrix& Y, double lambda, const SolverConfig& config) {
  switch (config.method) {
    case SolverConfig::Method::Stein:
      return fit_stein(handle, X, Y, lambda, config.tol);
    case SolverConfig::Method::CG:
      return fit_cg(handle, X, Y, lambda, config);
    case SolverConfig::Method::SGD:
      return fit_sgd(handle, X, Y, lambda, config);
    case SolverConfig::Method::Dense:
      return fit_dense(handle, X, Y, lambda);
  }
  throw InvalidParameter("unknown solver method");
}

Vector predict(const RidgeModel& model, const Vector& x) {
  return features::FastOperator(model.handle).apply(x, model.theta_flat());
}

Matrix predict_batch(const RidgeModel& model, const Matrix& X) {
  return features::FastOperator(model.handle)
      .predict_batch(X, model.theta_flat());
}

double ridge_objective(const features::FeatureMapHandle& handle,
                       const Matrix& X, const Matrix& Y, double lambda,
                       const Vector& theta) {
  const features::FastOperator op(handle);
  const Matrix residual = op.predict_batch(X, theta) - Y;
  const double n = static_cast<double>(X.rows());
  return (residual.squaredNorm() + lambda * theta.squaredNorm()) / n;
}

Vector ridge_gradient(const features::FeatureMapHandle& handle,
                      const Matrix& X, const Matrix& Y, double lambda,
                      const Vector& theta) {
  const features::FastOperator op(handle);
  const double n = static_cast<double>(X.rows());
  return 2.0 / n *
         (op.normal(X, theta) - op.adjoint_sum(X, Y) + lambda * theta);
}

ExactOVKModel fit_exact_ovk(const KernelSpec& spec, const Matrix& X,
                            const Matrix& Y, double lambda) {
  if (X.rows() != Y.rows()) {
    throw InvalidParameter("input and output row counts differ");
  }
  if (Y.cols() != spec.p) {
    throw InvalidParameter("output column count does not match p");
  }
  const Index n = X.rows();
  if (n * spec.p > 20000) {
    throw ResourceGuard("exact OVK solve refused: N * p exceeds 20000");
  }
  Matrix G = kernels::exact_gram(spec, X, X);
  G.diagonal().array() += lambda * static_cast<double>(n);
  Vector y_stacked(n * spec.p);
  for (Index i = 0; i < n; ++i) {
    y_stacked.segment(i * spec.p, spec.p) = Y.row(i).transpose();
  }
  const Vector a = Eigen::LDLT<Matrix>(G).solve(y_stacked);
  ExactOVKModel model;
  model.spec = spec;
  model.Xtrain = X;
  model.lambda = lambda;
  model.alpha.resize(n, spec.p);
  for (Index i = 0; i < n; ++i) {
    model.alpha.row(i) = a.segment(i * spec.p, spec.p).transpose();
  }
  return model;
}

Vector predict(const ExactOVKModel& model, const Vector& x) {
  Vector out = Vector::Zero(model.spec.p);
  for (Index i = 0; i < model.Xtrain.rows(); ++i) {
    const Vector delta = x - model.Xtrain.row(i).transpose();
    out += kernels::signature(model.spec, delta).value *
           model.alpha.row(i).transpose();
  }
  return out;
}

Matrix predict_batch(const ExactOVKModel& model, const Matrix& X) {
  Matrix out(X.rows(), model.spec.p);
  detail::parallel_for(X.rows(), thread_budget(), [&](Index i) {
    out.row(i) = predict(model, X.row(i).transpose()).transpose();
  });
  return out;
}

SimplexCode simplex_code(Index p) {
  if (p < 2) throw InvalidParameter("simplex coding needs p >= 2 classes");
  Matrix C(2, 1);
  C << 1.0, -1.0;
  for (Index q = 3; q <= p; ++q) {
    Matrix next = Matrix::Zero(q, q - 1);
    next(0, 0) = 1.0;
    const double head = -1.0 / static_cast<double>(q - 1);
    const double scale = std::sqrt(1.0 - head * head);
    next.block(1, 0, q - 1, 1).setConstant(head);
    next.block(1, 1, q - 1, q - 2) = scale * C;
    C = next;
  }
  return SimplexCode{C};
}

Matrix encode(const SimplexCode& code, const std::vector<int>& labels) {
  const Index p = code.C.rows();
  Matrix out(static_cast<Index>(labels.size()), code.C.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= p) {
      throw InvalidParameter("label out of range for simplex code");
    }
    out.row(static_cast<Index>(i)) = code.C.row(labels[i]);
  }
  return out;
}

std::vector<int> decode(const SimplexCode& code, const Matrix& scores) {
  if (scores.cols() != code.C.cols()) {
    throw InvalidParameter("score dimension does not match simplex code");
  }
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    (code.C * scores.row(i).transpose()).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

}  // namespace orff::learn
