#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vrmass/geometry.hpp"
#include "vrmass/mass.hpp"
#include "vrmass/vstatic.hpp"

namespace vrmass {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, index), so results do not depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const;
  /// Uniform in [0, 1).
  double uniform(std::uint64_t stream, std::uint64_t index) const;
  double uniform(std::uint64_t stream, std::uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(stream, index);
  }

 private:
  std::uint64_t seed_;
};

struct Perturbation {
  std::string label;
  SymmetricPerturbation h;
  /// Sup over r of the g-frame size of h.
  double norm = 0.0;
};

struct FamilyOptions {
  int count = 20;
  std::uint64_t seed = 1;
  /// Bump centres are log-spaced on [centre_lo, centre_hi]; 0 picks defaults
  /// from the domain start.
  double centre_lo = 0.0;
  double centre_hi = 0.0;
  /// Frame-relative amplitude bound of each component.
  double amplitude = 0.05;
};

/// Seeded bumps in both components, supported strictly inside the domain.
std::vector<Perturbation> bump_family(const RadialMetric& g, const FamilyOptions& opts);

struct ExperimentOptions {
  /// Finite-difference step t of the curve g ± t h (Richardson with t/2).
  double step = 1e-3;
  /// Verdict threshold: critical iff |raw| <= tol (1 + |h|).
  double tol = 1e-4;
  int jobs = 1;
  YamabeOptions projection{1e4, 400, 1e-12, 40};
  MassOptions mass{};
};

struct CurveDerivative {
  /// Richardson-refined derivative of m_VR along t ↦ project(g + t h).
  double raw = 0.0;
  /// Central differences at t and t/2.
  double coarse = 0.0;
  double fine = 0.0;
  /// Tangent of the projected curve at t = 0, Richardson-refined like `raw`.
  SymmetricPerturbation tangent;
  /// max |scal + n(n-1)| of the projected endpoints.
  double constraint_drift = 0.0;
  /// d/dt of the inner-boundary mean curvature and induced metric (0 without a boundary).
  double mean_curvature_rate = 0.0;
  double induced_metric_rate = 0.0;
};

CurveDerivative projected_mass_derivative(const RadialMetric& g, const SymmetricPerturbation& h,
                                          const ExperimentOptions& opts = {});

enum class Verdict { Critical, NonCritical, Rejected };

struct MemberReport {
  std::string label;
  Verdict verdict = Verdict::Rejected;
  double raw = 0.0;
  /// D𝓗 along the projected tangent with the supplied potential.
  double predicted = 0.0;
  double norm = 0.0;
  double constraint_drift = 0.0;
  double mean_curvature_rate = 0.0;
  double induced_metric_rate = 0.0;
  std::string diagnostic;
};

struct CriticalityReport {
  double tol = 0.0;
  std::vector<MemberReport> members;

  bool all_critical() const;
  bool any_noncritical() const;
};

/// Criticality of m_VR on a complete CSC metric along projected curves;
/// `potential` supplies the f of the predicted variation (f ≡ 1 for Einstein g).
CriticalityReport test_critical_no_boundary(const RadialMetric& g,
                                            const std::vector<Perturbation>& family,
                                            const StaticData& potential,
                                            const ExperimentOptions& opts = {});

/// Members must satisfy h_tan(r0) = 0 and DH[h](r0) = 0 (to 1e-10) and keep
/// the projected mean curvature fixed to first order; others are rejected.
CriticalityReport test_critical_with_boundary(const RadialMetric& g,
                                              const std::vector<Perturbation>& family,
                                              const StaticData& potential,
                                              const ExperimentOptions& opts = {});

/// Pairs h1 + α h2 of interior bumps, with α cancelling the first-order
/// drift of the projected inner mean curvature.
std::vector<Perturbation> bartnik_preserving_family(const RadialMetric& g,
                                                    const FamilyOptions& family,
                                                    const ExperimentOptions& opts = {});

struct BoundaryProbe {
  double raw = 0.0;
  /// ∫_{r0} (-2 f DH[k] - f K·k + g^{AB}k_AB ∇_ν f) dA for the projected tangent k.
  double reduced = 0.0;
  double relative_error = 0.0;
  double mean_curvature_rate = 0.0;
};

BoundaryProbe boundary_term_probe(const RadialMetric& g, const SymmetricPerturbation& h,
                                  const StaticData& potential, const ExperimentOptions& opts = {});

struct MultiplierFit {
  std::vector<double> radii;
  std::vector<double> values;
  RadialProfile f;
  /// Sup over interior nodes of the g-frame norm of D scal*(f) - (n-1) g.
  double residual = 0.0;
  double regularisation = 0.0;
};

/// Least-squares potential for D scal*(f) = (n-1) g on `grid`, with f = 1 at
/// the outer node and second-order finite differences.
MultiplierFit lagrange_multiplier_recovery(const RadialMetric& g, const LogGrid& grid);
MultiplierFit lagrange_multiplier_recovery(const RadialMetric& g);

struct Competitor {
  std::string label;
  RadialMetric metric;
};

struct ComparisonRow {
  std::string label;
  bool excluded = false;
  std::string diagnostic;
  double mass = 0.0;
  double mass_error = 0.0;
  double area_mismatch = 0.0;
  double mean_curvature_mismatch = 0.0;
  bool below_reference = false;
};

struct ComparisonTable {
  double reference_mass = 0.0;
  double tol = 0.0;
  std::vector<ComparisonRow> rows;
};

/// Projected competitors of γ with the same inner area and mean curvature.
std::vector<Competitor> matched_competitors(const RadialMetric& gamma, const FamilyOptions& family,
                                            const ExperimentOptions& opts = {});

/// Competitors whose inner area or mean curvature differ from γ's by more
/// than `boundary_tol` are excluded.
ComparisonTable mass_comparison(const RadialMetric& gamma, const std::vector<Competitor>& competitors,
                                double tol = 1e-4, double boundary_tol = 1e-8,
                                const ExperimentOptions& opts = {});

}  // namespace vrmass
