#pragma once

#include <optional>
#include <vector>

#include "vrmass/geometry.hpp"
#include "vrmass/weighted.hpp"

namespace vrmass {

/// A potential f and the constant λ of D scal*_g(f) = λ g.
struct StaticData {
  RadialProfile f;
  double lambda = 0.0;
};

struct VStaticResidualReport {
  std::vector<double> radii;
  /// |D scal*_g(f) - λ g| in the g orthonormal frame at each radius.
  std::vector<double> frame_residuals;
  double sup_frame_residual = 0.0;
  double delta = 0.0;
  /// max r^δ · frame residual.
  double weighted_residual = 0.0;
  /// r ↦ (1-n)(Δf - n f + nλ/(n-1)), the trace of the equation on a CSC metric.
  RadialProfile trace_residual_profile;
};

enum class Branch { LinearGrowth, AsymptoticallyConstant, Ambiguous };

struct ClassificationResult {
  Branch branch = Branch::Ambiguous;
  /// Limit of f (constant branch) and limit of f/r (linear branch).
  double limit_value = 0.0;
  double growth_slope = 0.0;
  /// Decay rate of f - limit; +inf when f equals its limit on the window.
  double fitted_rate = 0.0;
  /// |limit - λ/(n-1)| ≤ 1e-3 max(1, |limit|).
  bool limit_matches_lambda = false;
};

/// Kottler metric q = 1/(r² + k - 2m r^{2-n}), w = r².
struct KottlerModel {
  RadialMetric metric;
  std::optional<double> horizon;
};

/// Largest root of r² + k - 2m r^{2-n}, if any (m > 0, or k = -1 and m = 0
/// excluded since that root is r_k itself).
std::optional<double> kottler_horizon(int n, int k, double m);

/// With `with_boundary`, the inner boundary sits at r_h(1 + eta_rel); the
/// manifold's own inner radius is otherwise kept. Without a boundary and
/// m > 0 the metric is only evaluable outside the horizon.
KottlerModel schwarzschild_ads(const RadialManifold& man, double m, bool with_boundary = false,
                               double eta_rel = 1e-2);

/// Log grid from just outside the domain start (or horizon) to r_max.
LogGrid residual_grid(const RadialMetric& g, double r_max = 1e3, int per_decade = 40);

VStaticResidualReport vstatic_residual(const RadialMetric& g, const StaticData& sd,
                                       const LogGrid& grid, double delta = 0.0);
VStaticResidualReport vstatic_residual(const RadialMetric& g, const StaticData& sd);

struct TraceSolution {
  RadialProfile f;
  /// Value of f at the outer end of its table.
  double attained_asymptote = 0.0;
  /// max |(Δ - n)(f - asymptote)| / max(1, |f|) over the table nodes.
  double ode_residual = 0.0;
};

/// Bounded solution of (-Δ_g + n)(f - asymptote) = 0, with f(r0) =
/// boundary_value when g has an inner boundary. Without a boundary the
/// bounded solution is the constant.
TraceSolution solve_trace_equation(const RadialMetric& g, std::optional<double> boundary_value,
                                   double asymptote);

/// Initial data at the inner radius: w0, dw/ds, f0, df/ds with s the g arc length.
struct RadialInitialData {
  double w0 = 1.0;
  double w0_prime = 2.0;
  double f0 = 1.0;
  double f0_prime = 0.0;
};

struct RadialVStaticSolution {
  RadialMetric metric;
  StaticData data;
  double r_start = 0.0;
  /// Outer end actually reached; smaller than requested after a blow-up.
  double r_end = 0.0;
  bool blew_up = false;
  /// sup of the monitored tangential component of D scal*(f) - λg (frame).
  double tangential_residual = 0.0;
};

/// Integrates scal = -n(n-1) and the trace equation in the areal gauge
/// w = r² from r0 = √w0 to r_max, monitoring the tangential component.
RadialVStaticSolution solve_radial_vstatic(const RadialManifold& man, const RadialInitialData& data,
                                           double lambda, double r_max = 1e3);

/// The solution of the radial component of D scal*(f) = λg on a CSC metric
/// that tends to λ/(n-1), integrated inward from far out.
StaticData bounded_static_potential(const RadialMetric& g, double lambda);

/// Tail classification over the outer half of `grid`.
ClassificationResult classify_asymptotics(const RadialProfile& f, double lambda, int n,
                                          const LogGrid& grid);

struct YamabeOptions {
  double outer_radius = 1e4;
  int per_decade = 400;
  double newton_tol = 1e-12;
  int max_newton = 40;
};

struct YamabeResult {
  RadialMetric metric;
  /// Conformal factor u with metric = u^{4/(n-2)} g.
  RadialProfile factor;
  int newton_iterations = 0;
  double matching_residual = 0.0;
  /// Mean curvature change at an inner boundary (0 without one).
  double mean_curvature_drift = 0.0;
};

/// Conformal projection onto scal = -n(n-1) with factor → 1 at infinity and
/// factor = 1 at an inner boundary. Complete domains need k = 1 (regular
/// origin).
YamabeResult yamabe_project(const RadialMetric& g, const YamabeOptions& opts = {});

}  // namespace vrmass
