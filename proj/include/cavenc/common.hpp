#pragma once
// Shared scalar types, error taxonomy and small numeric utilities used across
// the cavity-enclosure toolkit.

#include <Eigen/Dense>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cavenc {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;
using VecXd = Eigen::VectorXd;
using VecXc = Eigen::VectorXcd;
using MatXd = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;

/// Wrong usage: malformed scene files, bad flag combinations, out-of-range
/// parameters.  CLI exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular linear systems, non-convergent quadrature,
/// guaranteed overflow of a requested evaluation.  CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A geometric hypothesis the method relies on fails for the given scene
/// (probe placement, convexity, disjointness...).  CLI exit code 3.
struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;

/// Full-precision scientific formatting used for every number the tools emit,
/// so repeated runs are byte-identical.
inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string fmt_full(const Complex& z) {
  return fmt_full(z.real()) + (z.imag() < 0 ? "" : "+") + fmt_full(z.imag()) + "i";
}

/// Relative closeness with an absolute floor; the workhorse of the tests.
inline bool close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

template <class Scalar>
struct ScalarTraits {
  static constexpr bool is_complex = false;
  static double abs(Scalar v) { return std::abs(v); }
};
template <>
struct ScalarTraits<Complex> {
  static constexpr bool is_complex = true;
  static double abs(const Complex& v) { return std::abs(v); }
};

}  // namespace cavenc
