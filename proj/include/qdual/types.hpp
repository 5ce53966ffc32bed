// Shared numeric types and small helpers used across the library.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdual {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Default dense-matrix dimension cap; larger objects must go through
// matrix-free or contraction-based code paths.
inline constexpr std::int64_t kDefaultDenseCap = 16384;

// Requested object exceeds the configured dense cap (exit code 3 in the CLI).
struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical gate failed (non-unitary construction, non-convergence, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters / preconditions (exit code 2 in the CLI).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double unitarity_defect(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols()))
      .cwiseAbs()
      .maxCoeff();
}

// x mod 2*pi, result in [0, 2*pi).
inline double mod_2pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  return r;
}

// Wrap to (-pi, pi].
inline double wrap_pi(double x) {
  double r = mod_2pi(x);
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

// x mod 1, result in [0, 1).
inline double mod_1(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // guard against floor rounding at the boundary
  return r;
}

// Integer power with overflow check; throws CapExceededError past `limit`.
inline std::int64_t checked_ipow(std::int64_t base, int exp,
                                 std::int64_t limit = (std::int64_t{1} << 60)) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > limit / base) {
      throw CapExceededError("integer power overflow: " + std::to_string(base) +
                             "^" + std::to_string(exp));
    }
    r *= base;
  }
  return r;
}

}  // namespace qdual
