#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orff {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Bad user-supplied argument (dimensions, ranges, unsupported combinations).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative or direct solve did not reach the requested accuracy.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// A size guard refused to run a computation that would not fit desk scale.
class ResourceGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family { Decomposable, CurlFree, DivFree };

std::string to_string(Family family);
Family family_from_string(const std::string& name);  // "dec" | "curl" | "div"

/// Shift-invariant matrix-valued kernel built on the Gaussian scalar base
/// exp(-|delta|^2 / (2 sigma^2)).  The output-coupling matrix A is only
/// meaningful for the decomposable family; curl-free and div-free kernels
/// require p == d.
struct KernelSpec {
  Family family = Family::Decomposable;
  Index d = 0;
  Index p = 0;
  double sigma = 1.0;
  Matrix A;  // p x p, symmetric PSD; empty unless decomposable

  static KernelSpec decomposable(Index d, Matrix A, double sigma);
  static KernelSpec curl_free(Index d, double sigma);
  static KernelSpec div_free(Index d, double sigma);
};

}  // namespace orff
