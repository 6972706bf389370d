#pragma once

#include <vector>

namespace vrmass::coercivity {

struct Constants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Coefficients of the weighted integration-by-parts estimate for the
/// exponent a of the weight and the free parameter beta.
Constants constants(double a, double beta, int n);

/// c1(a, a/2 - 1) as an explicit cubic in a.
double p_of_a(double a, int n);
double p_derivative(double a, int n);

struct CriticalPoints {
  double a_plus = 0.0;
  double a_minus = 0.0;
};

/// Roots of p'(a).
CriticalPoints critical_points(int n);

/// Weight exponent a = -2 tau + n - delta.
double weight_exponent(double tau, int n, double delta);

struct NegativityReport {
  int n = 0;
  double delta = 0.0;
  std::vector<double> a_samples;
  std::vector<double> p_values;
  std::vector<double> c2_values;
  double max_p = 0.0;
  double max_c2 = 0.0;
  CriticalPoints roots;
  /// No root of p' in (-1, 1 + eps).
  bool roots_excluded = false;
  /// tau in ((n-1)/2, n/2] maps into [-delta, 1-delta).
  bool interval_maps = false;
  bool negative = false;
};

/// Dense sampling of p and c2 at beta = a/2 - 1 on [-delta, 1 - delta).
NegativityReport verify_negativity(int n, double delta, int samples = 2001);

}  // namespace vrmass::coercivity
