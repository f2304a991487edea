#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace soris {

using cdouble = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Phase of a complex number in (-pi, pi]; std::arg yields -pi for -1 - 0j.
inline double phase_of(cdouble z) {
  double a = std::arg(z);
  return a == -kPi ? kPi : a;
}

// Selects serial reference loops or their OpenMP counterparts. Both paths
// produce bit-identical results.
enum class Execution { serial, parallel };

}  // namespace soris
