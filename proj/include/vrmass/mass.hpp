#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vrmass/geometry.hpp"
#include "vrmass/weighted.hpp"

namespace vrmass {

struct MassOptions {
  /// First cutoff radius; 0 selects a default beyond every profile feature.
  double r_start = 0.0;
  /// Cutoffs R_j = r_start · 2^j, j = 0 .. cutoffs-1.
  int cutoffs = 7;
  double tol = kDefaultTolerance;
};

struct MassReport {
  std::vector<std::pair<double, double>> surface_samples;
  std::vector<std::pair<double, double>> volume_samples;
  /// combined = surface + 2(n-1)·volume, sample by sample.
  std::vector<std::pair<double, double>> combined_samples;
  double mass = 0.0;
  double error_estimate = 0.0;
  /// ∫ |scal + n(n-1)| dV_g over the whole domain.
  double scalar_integrability = 0.0;
  bool integrability_ok = false;
  /// Reference volume between r_k and an inner boundary r0; excluded from
  /// the renormalised volume by convention and reported for comparisons
  /// across conventions.
  double reference_core_volume = 0.0;
  ExtrapolationReport extrapolation;
};

/// ∫_{S_R} (∇̂^i g_ij - ∇̂_j tr_ĝ g) ν̂^j dS_ĝ. In radial form, with a = q - q̂,
/// b = w - r², Q = q̂, W = r², m = n-1:
///   Vol(N) m W^{m/2} Q^{-1/2} [ (W'/2W)(a/Q - b/W) - (b/W)' ].
double surface_term(const RadialMetric& g, double R);

/// d/dr of surface_term, evaluated exactly from the profile jets.
double surface_term_derivative(const RadialMetric& g, double r);

/// The same flux formula applied to a perturbation h instead of g - ĝ.
double perturbation_surface_term(const RadialMetric& g, const SymmetricPerturbation& h, double R);

/// Vol(N) ∫_{start}^{R} (√(q w^{n-1}) - √q̂ r^{n-1}) dr, start = domain start.
double renormalised_volume(const RadialMetric& g, double R, double tol = kDefaultTolerance);

/// Radial integrand of renormalised_volume at r.
double volume_discrepancy_density(const RadialMetric& g, double r);

/// Quadrature breakpoints for g: profile features plus a geometric cluster
/// towards a near-horizon inner boundary.
std::vector<double> metric_breakpoints(const RadialMetric& g);

/// Default first cutoff radius for the mass limit.
double default_cutoff_start(const RadialMetric& g);

MassReport mass_vr(const RadialMetric& g, const MassOptions& opts = {});

/// ∫ f (scal + n(n-1)) dV_g over the whole domain.
double constraint_integral(const RadialMetric& g, const RadialProfile& f,
                           double tol = kDefaultTolerance);

/// The regularised Lagrange function as a single radial integral:
///   ∫ [∇̂^i∇̂^j g_ij - Δ̂ tr_ĝ g + 2(n-1)(√g/√ĝ - 1) - f (scal+n(n-1)) √g/√ĝ] dV_ĝ,
/// plus the inner-boundary flux of the divergence terms when ∂M ≠ ∅, so that
/// it equals m_VR(g) - ∫ f (scal + n(n-1)) dV_g.
double regularised_hamiltonian(const RadialMetric& g, const RadialProfile& f,
                               double tol = kDefaultTolerance);

}  // namespace vrmass
