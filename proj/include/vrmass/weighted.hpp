#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vrmass/profile.hpp"

namespace vrmass {

inline constexpr double kDefaultTolerance = 1e-8;

/// Log-spaced radial nodes, r_min and r_max included.
struct LogGrid {
  double r_min = 1.0;
  double r_max = 10.0;
  int points_per_decade = 20;
  std::vector<double> nodes;

  static LogGrid make(double r_min, double r_max, int points_per_decade);
};

/// Result of fitting log|u| ≈ c - rate·log r over a tail window.
struct DecayEstimate {
  /// Empty when the profile vanishes identically on the window.
  std::optional<double> fitted_rate;
  double fit_residual = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;

  bool compact_support() const { return !fitted_rate.has_value(); }
};

struct ExtrapolationReport {
  std::vector<std::pair<double, double>> samples;
  double limit = 0.0;
  /// Free-fit exponent p of v(R) ≈ v∞ + c R^{-p}; NaN when degenerate.
  double correction_exponent = 0.0;
  double error_estimate = 0.0;
  /// All samples equal: the limit is the common value and p is undefined.
  bool degenerate = false;
  /// Limit of the free three-point fit, kept as a cross-check when a ladder
  /// of hinted exponents produced `limit`.
  double free_fit_limit = 0.0;
};

/// Deterministic pairwise summation (fixed split order).
double pairwise_sum(std::span<const double> values);

/// max over nodes of r^δ |u(r)| (zeroth-order part of the weighted norm).
double weighted_sup_norm(const RadialProfile& u, double delta, const LogGrid& grid);

/// Least-squares slope of log|u| against log r over the outer half of the grid.
DecayEstimate estimate_decay_rate(const RadialProfile& u, const LogGrid& grid);
DecayEstimate estimate_decay_rate(const std::function<double(double)>& u, const LogGrid& grid);

/// Adaptive Gauss–Kronrod quadrature of f over [a, b]; b may be +infinity.
/// Interior breakpoints split the panels. Semi-infinite ranges are summed
/// octave by octave and closed with a geometric tail estimate; a tail that
/// does not decay faster than 1/r raises NonConvergentTail.
double integrate_radial(const std::function<double(double)>& f, double a, double b,
                        double tol = kDefaultTolerance, std::span<const double> breakpoints = {});
double integrate_radial(const RadialProfile& f, double a, double b,
                        double tol = kDefaultTolerance);

/// Limit of v(R) as R → ∞ from samples with strictly increasing R.
/// Without a hint, v∞ + c R^{-p} is fitted through the last three samples
/// (p free). With p_hint, a Richardson ladder with exponents p_hint,
/// p_hint + 1, ... through all samples supplies the limit.
ExtrapolationReport extrapolate_limit(std::vector<std::pair<double, double>> samples,
                                      std::optional<double> p_hint = std::nullopt);

}  // namespace vrmass
