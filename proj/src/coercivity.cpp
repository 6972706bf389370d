#include "vrmass/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrmass/errors.hpp"

namespace vrmass::coercivity {

Constants constants(double a, double beta, int n) {
  const double c1 = beta * (2.0 * n - beta * (a - 1.0 + n)) + beta * beta + 1.0 - a * beta;
  const double shift = beta - (0.5 * a - 1.0);
  const double c2 = shift * shift - 0.25 * a * a - n;
  return {c1, c2};
}

double p_of_a(double a, int n) {
  return ((-0.25 * a + (1.0 - 0.25 * n)) * a + 2.0 * (n - 1.0)) * a + 3.0 * (1.0 - n);
}

double p_derivative(double a, int n) {
  return (-0.75 * a + 2.0 * (1.0 - 0.25 * n)) * a + 2.0 * (n - 1.0);
}

CriticalPoints critical_points(int n) {
  if (n < 3) throw ValidationError("critical_points: n must be >= 3");
  // p'(a) = -(3a^2 + 2(n-4)a - 8(n-1))/4
  const double centre = (4.0 - n) / 3.0;
  const double half = 2.0 / 3.0 * std::sqrt(std::pow(2.0 - 0.5 * n, 2) + 6.0 * (n - 1.0));
  return {centre + half, centre - half};
}

double weight_exponent(double tau, int n, double delta) { return -2.0 * tau + n - delta; }

NegativityReport verify_negativity(int n, double delta, int samples) {
  if (n < 3) throw ValidationError("verify_negativity: n must be >= 3");
  if (!(delta < 1.0)) throw ValidationError("verify_negativity: delta must be < 1");
  if (samples < 2) throw ValidationError("verify_negativity: need at least 2 samples");
  NegativityReport rep;
  rep.n = n;
  rep.delta = delta;
  rep.max_p = -std::numeric_limits<double>::infinity();
  rep.max_c2 = rep.max_p;
  const double lo = -delta;
  const double hi = 1.0 - delta;
  for (int i = 0; i < samples; ++i) {
    // Half-open interval: the last sample sits just below 1 - delta.
    const double a = lo + (hi - lo) * i / samples;
    const auto c = constants(a, 0.5 * a - 1.0, n);
    rep.a_samples.push_back(a);
    rep.p_values.push_back(p_of_a(a, n));
    rep.c2_values.push_back(c.c2);
    rep.max_p = std::max(rep.max_p, rep.p_values.back());
    rep.max_c2 = std::max(rep.max_c2, c.c2);
  }
  rep.roots = critical_points(n);
  constexpr double eps = 1e-2;
  auto inside = [&](double r) { return r > -1.0 && r < 1.0 + eps; };
  rep.roots_excluded = !inside(rep.roots.a_plus) && !inside(rep.roots.a_minus);
  // a is decreasing in tau: the open lower tau end gives the open upper a end.
  const double a_at_tau_lo = weight_exponent(0.5 * (n - 1.0), n, delta);
  const double a_at_tau_hi = weight_exponent(0.5 * n, n, delta);
  rep.interval_maps = a_at_tau_lo <= hi && a_at_tau_hi >= lo;
  rep.negative = rep.max_p < 0.0 && rep.max_c2 < 0.0 && rep.roots_excluded;
  return rep;
}

}  // namespace vrmass::coercivity
