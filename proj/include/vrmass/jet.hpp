#pragma once

#include <cmath>

namespace vrmass {

/// Value of a radial function together with its first two r-derivatives.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// First-order forward-mode dual number. The closed-form curvature
/// reductions are templated on the scalar type so that a single formula
/// yields both the value and an exact directional derivative.
struct Dual {
  double v = 0.0;
  double e = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT(implicit)
  constexpr Dual(double value, double eps) : v(value), e(eps) {}
};

inline constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.e + b.e}; }
inline constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.e - b.e}; }
inline constexpr Dual operator-(Dual a) { return {-a.v, -a.e}; }
inline constexpr Dual operator*(Dual a, Dual b) {
  return {a.v * b.v, a.e * b.v + a.v * b.e};
}
inline constexpr Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.e * b.v - a.v * b.e) / (b.v * b.v)};
}
inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.v);
  return {s, a.e / (2.0 * s)};
}
inline Dual pow(Dual a, double p) {
  const double s = std::pow(a.v, p);
  return {s, p * std::pow(a.v, p - 1.0) * a.e};
}

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

}  // namespace vrmass
