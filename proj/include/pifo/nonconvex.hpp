#pragma once

#include <cmath>

namespace pifo {

// Separable nonconvex term used by the NC family: the primitive of
// 120 t^2 (t-1) / (1 + t^2) taken from 1, so gamma_well(1) = 0. The closed
// form below follows from t^2(t-1)/(1+t^2) = (t-1) + (1-t)/(1+t^2) and is
// validated against adaptive quadrature in the test suite.
inline double gamma_well(double x) {
  return 120.0 * (0.5 * (x * x - 1.0) - (x - 1.0) -
                  0.5 * std::log1p(0.5 * (x * x - 1.0)) + std::atan(x) -
                  0.78539816339744830961566084581988);  // pi/4
}

inline double gamma_well_d1(double x) {
  return 120.0 * x * x * (x - 1.0) / (1.0 + x * x);
}

inline double gamma_well_d2(double x) {
  const double d = 1.0 + x * x;
  return 120.0 * (x * x * x * x + 3.0 * x * x - 2.0 * x) / (d * d);
}

// Curvature bracket of gamma_well: second derivative stays within
// [-45(sqrt(3)-1), 180].
inline constexpr double kGammaWellLowerCurvature = -45.0 * 0.7320508075688772935;
inline constexpr double kGammaWellUpperCurvature = 180.0;

}  // namespace pifo
