#pragma once

#include <cmath>
#include <optional>

#include "vrmass/jet.hpp"
#include "vrmass/profile.hpp"

namespace vrmass {

/// The model end (r_k, ∞) × N, with (N, h) closed of constant curvature k.
/// The cross-section is never discretised; only k and Vol(N) enter.
struct RadialManifold {
  int n = 3;
  int k = 1;
  double cross_section_volume = 1.0;
  std::optional<double> inner_radius;

  /// Validates n >= 3, k ∈ {-1,0,1}, Vol(N) > 0 and r0 > r_k.
  static RadialManifold make(int n, int k, double cross_section_volume,
                             std::optional<double> inner_radius = std::nullopt);

  double r_k() const { return k == -1 ? 1.0 : 0.0; }
  /// Inner edge of the radial domain: r0 when a boundary is present, else r_k.
  double domain_start() const { return inner_radius.value_or(r_k()); }
  bool has_boundary() const { return inner_radius.has_value(); }
};

/// g = q dr² + w h, asymptotic to the reference at rate tau.
struct RadialMetric {
  RadialManifold manifold;
  RadialProfile q;
  RadialProfile w;
  double tau = 0.0;
  /// Radius of a degenerate horizon (q → ∞) lying at or below the domain start.
  std::optional<double> horizon;

  int n() const { return manifold.n; }
  double domain_start() const { return manifold.domain_start(); }
  /// Throws DomainError unless r lies in the (half-)open radial domain.
  void check_domain(double r) const;
};

/// h = h_rr dr² + h_tan h.
struct SymmetricPerturbation {
  RadialProfile h_rr;
  RadialProfile h_tan;
};

/// Values and derivatives of (q, w) at a point. Templated so that the
/// curvature reductions below can be differentiated exactly with Dual.
template <class T>
struct MetricJet {
  T q, q1, w, w1, w2;
};

MetricJet<double> metric_jet(const RadialMetric& g, double r);

/// ĝ_rr = 1/(r²+k)
RadialProfile reference_q(int k);
RadialProfile reference_w();

RadialMetric reference_metric(const RadialManifold& man);

/// g + eps·h with the same manifold and decay metadata.
RadialMetric perturbed(const RadialMetric& g, const SymmetricPerturbation& h, double eps);

struct CurvatureFields {
  double scal = 0.0;
  /// Coordinate coefficients: Ric = ric_rr dr² + ric_tan h.
  double ric_rr = 0.0;
  double ric_tan = 0.0;
  /// |Ric + (n-1) g| measured in the ĝ orthonormal frame.
  double einstein_deficit = 0.0;
};

CurvatureFields curvature_fields(const RadialMetric& g, double r);

/// scal + n(n-1), flushed to 0 below 1e-11·n(n-1) where it is rounding noise
/// of the closed-form reduction.
double scalar_excess(const RadialMetric& g, double r);

struct MeanCurvatureData {
  /// Mean curvature of {r = const} w.r.t. the normal pointing to infinity.
  double H = 0.0;
  /// Second fundamental form = K_tan · (w h).
  double K_tan = 0.0;
};

/// At a declared horizon radius the exact limit H = K_tan = 0 is returned.
MeanCurvatureData mean_curvature_data(const RadialMetric& g, double r);

/// √g / √ĝ = √(q w^{n-1}) / √(q̂ r^{2(n-1)})
double volume_element_ratio(const RadialMetric& g, double r);

/// Radial density of dV_g against dr, including Vol(N).
double volume_density(const RadialMetric& g, double r);

/// e(r) = sqrt(((q-q̂)/q̂)² + (n-1)((w-r²)/r²)²)
double frame_deviation(const RadialMetric& g, double r);
RadialProfile frame_deviation_profile(const RadialMetric& g);

namespace formulas {

// Warped-product reductions for g = q dr² + w h with h of curvature k.
// With φ = √w and s the g-arc length,
//   A = φ_ss/φ = w''/(2wq) - w'²/(4w²q) - w'q'/(4wq²),  B = φ_s²/φ² = w'²/(4w²q).

template <class T>
T warp_accel(const MetricJet<T>& j) {
  return j.w2 / (2.0 * j.w * j.q) - j.w1 * j.w1 / (4.0 * j.w * j.w * j.q) -
         j.w1 * j.q1 / (4.0 * j.w * j.q * j.q);
}

template <class T>
T warp_speed_sq(const MetricJet<T>& j) {
  return j.w1 * j.w1 / (4.0 * j.w * j.w * j.q);
}

/// Ric(e_s, e_s) in the g orthonormal frame.
template <class T>
T ricci_radial_frame(const MetricJet<T>& j, int n) {
  return -static_cast<double>(n - 1) * warp_accel(j);
}

/// Ric(e_A, e_A) in the g orthonormal frame.
template <class T>
T ricci_tangential_frame(const MetricJet<T>& j, int n, int k) {
  return -warp_accel(j) + static_cast<double>(n - 2) * (static_cast<double>(k) / j.w - warp_speed_sq(j));
}

template <class T>
T scalar_curvature(const MetricJet<T>& j, int n, int k) {
  const double m = n - 1;
  return -2.0 * m * warp_accel(j) +
         m * (m - 1.0) * (static_cast<double>(k) / j.w - warp_speed_sq(j));
}

template <class T>
T mean_curvature(const MetricJet<T>& j, int n) {
  using std::sqrt;
  return static_cast<double>(n - 1) * j.w1 / (2.0 * j.w * sqrt(j.q));
}

}  // namespace formulas

}  // namespace vrmass
