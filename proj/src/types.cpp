#include "orff/types.hpp"

#include <Eigen/Eigenvalues>

#include "orff/linalg.hpp"

namespace orff {

std::string to_string(Family family) {
  switch (family) {
    case Family::Decomposable:
      return "dec";
    case Family::CurlFree:
      return "curl";
    case Family::DivFree:
      return "div";
  }
  throw InvalidParameter("unknown kernel family");
}

Family family_from_string(const std::string& name) {
  if (name == "dec") return Family::Decomposable;
  if (name == "curl") return Family::CurlFree;
  if (name == "div") return Family::DivFree;
  throw InvalidParameter("unknown kernel family '" + name +
                         "' (expected dec, curl or div)");
}

namespace {

void check_common(Index d, Index p, double sigma) {
  if (d < 1) throw InvalidParameter("input dimension d must be >= 1");
  if (p < 1) throw InvalidParameter("output dimension p must be >= 1");
  if (!(sigma > 0.0)) throw InvalidParameter("bandwidth sigma must be > 0");
}

// Symmetric-eigendecomposition validation of the output-coupling matrix.
// Eigenvalues in [-1e-10 * |A|, 0) are clamped to zero, anything lower is
// rejected.
Matrix validate_coupling(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw InvalidParameter("coupling matrix A must be square");
  }
  if (!is_symmetric(A, 1e-8)) {
    throw InvalidParameter("coupling matrix A must be symmetric");
  }
  const Matrix sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector evals = eig.eigenvalues();
  const double norm = evals.cwiseAbs().maxCoeff();
  if (norm == 0.0) return Matrix::Zero(A.rows(), A.cols());
  for (Index i = 0; i < evals.size(); ++i) {
    if (evals(i) < -1e-10 * norm) {
      throw InvalidParameter("coupling matrix A is not positive semi-definite");
    }
    if (evals(i) < 0.0) evals(i) = 0.0;
  }
  return eig.eigenvectors() * evals.asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

KernelSpec KernelSpec::decomposable(Index d, Matrix A, double sigma) {
  check_common(d, A.rows(), sigma);
  KernelSpec spec;
  spec.family = Family::Decomposable;
  spec.d = d;
  spec.p = A.rows();
  spec.sigma = sigma;
  spec.A = validate_coupling(A);
  return spec;
}

KernelSpec KernelSpec::curl_free(Index d, double sigma) {
  check_common(d, d, sigma);
  KernelSpec spec;
  spec.family = Family::CurlFree;
  spec.d = d;
  spec.p = d;  // vector fields: output and input dimensions coincide
  spec.sigma = sigma;
  return spec;
}

KernelSpec KernelSpec::div_free(Index d, double sigma) {
  check_common(d, d, sigma);
  KernelSpec spec;
  spec.family = Family::DivFree;
  spec.d = d;
  spec.p = d;
  spec.sigma = sigma;
  return spec;
}

}  // namespace orff
