#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace snake {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Tolerances shared by every module. One record so that the numbers that
/// decide "equal", "lined" or "drifted off the group" live in one place.
struct NumericsSettings {
  double unit_tolerance = 1e-12;       // |x| = 1 for sphere points
  double group_residual = 1e-9;        // |g^T J g - J| after renormalization
  double renormalize_limit = 0.1;      // beyond this the integrator blew up
  int renormalize_every = 16;          // steps between renormalizations
  double cluster_tolerance = 1e-9;     // equal-value clustering (sedentariness)
  double lined_tolerance = 1e-8;       // sigma_min(M) <= tol * L
  double quadrature_tolerance = 1e-11; // successive composite estimates
  double su11_determinant = 1e-10;     // |a|^2 - |b|^2 = 1
};

const NumericsSettings& settings();

/// Raised when an operation is called outside its domain. `code` is a
/// short machine-readable tag (e.g. "admissible_ball", "lined").
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string code, const std::string& what)
      : std::invalid_argument(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Numerical failure during a computation that started from valid input.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace snake
