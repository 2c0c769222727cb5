#pragma once

// Scalar special-value helpers with removable singularities at 0.
// Each function switches to a short Taylor expansion below a threshold,
// because the naive forms lose ~8 digits there (e.g. csc²x − 1/x²).

#include <cmath>
#include <stdexcept>

namespace heatlab {

// sin(x)/x, even, value 1 at 0.
inline double sinc(double x) {
  double ax = std::fabs(x);
  if (ax < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// sinh(x)/x, even, value 1 at 0.
inline double sinhc(double x) {
  double ax = std::fabs(x);
  if (ax < 1e-4) {
    double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

// 2 sin(x/2)/x, even, value 1 at 0.
inline double half_angle_sinc(double x) { return sinc(0.5 * x); }

// 2 sinh(x/2)/x, even, value 1 at 0.
inline double half_angle_sinhc(double x) { return sinhc(0.5 * x); }

// csc²x − 1/x².  Laurent tail: 1/3 + x²/15 + 2x⁴/189 + x⁶/675 + O(x⁸).
inline double csc2_minus_invsq(double x) {
  double ax = std::fabs(x);
  if (ax < 1e-3) {
    double x2 = x * x;
    return 1.0 / 3.0 + x2 / 15.0 + 2.0 * x2 * x2 / 189.0 + x2 * x2 * x2 / 675.0;
  }
  double s = std::sin(x);
  return 1.0 / (s * s) - 1.0 / (x * x);
}

// csch²x − 1/x².  Tail: −1/3 + x²/15 − 2x⁴/189 + x⁶/675 − O(x⁸).
inline double csch2_minus_invsq(double x) {
  double ax = std::fabs(x);
  if (ax < 1e-3) {
    double x2 = x * x;
    return -1.0 / 3.0 + x2 / 15.0 - 2.0 * x2 * x2 / 189.0 + x2 * x2 * x2 / 675.0;
  }
  double s = std::sinh(x);
  return 1.0 / (s * s) - 1.0 / (x * x);
}

inline double cot(double x) { return std::cos(x) / std::sin(x); }

inline double coth(double x) { return std::cosh(x) / std::sinh(x); }

}  // namespace heatlab
