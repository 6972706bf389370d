#include "vrmass/geometry.hpp"

#include <cmath>
#include <string>

#include "vrmass/errors.hpp"

namespace vrmass {

RadialManifold RadialManifold::make(int n, int k, double cross_section_volume,
                                    std::optional<double> inner_radius) {
  if (n < 3) throw ValidationError("manifold.n: dimension must be >= 3, got " + std::to_string(n));
  if (k < -1 || k > 1)
    throw ValidationError("manifold.k: must be one of -1, 0, 1, got " + std::to_string(k));
  if (!(cross_section_volume > 0.0))
    throw ValidationError("manifold.cross_section_volume: must be positive");
  RadialManifold man{n, k, cross_section_volume, inner_radius};
  if (inner_radius && !(*inner_radius > man.r_k()))
    throw ValidationError("manifold.inner_radius: must exceed r_k");
  return man;
}

void RadialMetric::check_domain(double r) const {
  const double start = domain_start();
  const bool ok = manifold.has_boundary() ? r >= start : r > start;
  if (!ok || !std::isfinite(r))
    throw DomainError("radius " + std::to_string(r) + " outside the radial domain starting at " +
                      std::to_string(start));
}

MetricJet<double> metric_jet(const RadialMetric& g, double r) {
  g.check_domain(r);
  const Jet q = g.q(r);
  const Jet w = g.w(r);
  if (!(q.v > 0.0) || !(w.v > 0.0))
    throw DomainError("metric lost positivity at r = " + std::to_string(r));
  return {q.v, q.d1, w.v, w.d1, w.d2};
}

RadialProfile reference_q(int k) {
  return RadialProfile([k](double r) {
    const double s = r * r + k;
    const double q = 1.0 / s;
    return Jet{q, -2.0 * r * q * q, (6.0 * r * r - 2.0 * k) * q * q * q};
  });
}

RadialProfile reference_w() {
  return RadialProfile([](double r) { return Jet{r * r, 2.0 * r, 2.0}; });
}

RadialMetric reference_metric(const RadialManifold& man) {
  return RadialMetric{man, reference_q(man.k), reference_w(), static_cast<double>(man.n),
                      std::nullopt};
}

RadialMetric perturbed(const RadialMetric& g, const SymmetricPerturbation& h, double eps) {
  RadialMetric out = g;
  if (eps != 0.0) {
    out.q = g.q + eps * h.h_rr;
    out.w = g.w + eps * h.h_tan;
  }
  return out;
}

CurvatureFields curvature_fields(const RadialMetric& g, double r) {
  const auto j = metric_jet(g, r);
  const int n = g.n();
  const int k = g.manifold.k;
  const double m = n - 1;
  CurvatureFields c;
  c.scal = formulas::scalar_curvature(j, n, k);
  c.ric_rr = j.q * formulas::ricci_radial_frame(j, n);
  c.ric_tan = j.w * formulas::ricci_tangential_frame(j, n, k);
  const double qhat = 1.0 / (r * r + k);
  const double e_rr = (c.ric_rr + m * j.q) / qhat;
  const double e_tan = (c.ric_tan + m * j.w) / (r * r);
  c.einstein_deficit = std::sqrt(e_rr * e_rr + m * e_tan * e_tan);
  return c;
}

double scalar_excess(const RadialMetric& g, double r) {
  const double nn = g.n() * (g.n() - 1.0);
  const double e = curvature_fields(g, r).scal + nn;
  return std::abs(e) < 1e-11 * nn ? 0.0 : e;
}

MeanCurvatureData mean_curvature_data(const RadialMetric& g, double r) {
  if (g.horizon && r == *g.horizon) return {0.0, 0.0};
  const auto j = metric_jet(g, r);
  const double k_tan = j.w1 / (2.0 * j.w * std::sqrt(j.q));
  return {formulas::mean_curvature(j, g.n()), k_tan};
}

double volume_element_ratio(const RadialMetric& g, double r) {
  const auto j = metric_jet(g, r);
  const double m = g.n() - 1;
  const double qhat = 1.0 / (r * r + g.manifold.k);
  return std::sqrt(j.q / qhat) * std::pow(j.w / (r * r), 0.5 * m);
}

double volume_density(const RadialMetric& g, double r) {
  const auto j = metric_jet(g, r);
  const double m = g.n() - 1;
  return g.manifold.cross_section_volume * std::sqrt(j.q) * std::pow(j.w, 0.5 * m);
}

double frame_deviation(const RadialMetric& g, double r) {
  const auto j = metric_jet(g, r);
  const double m = g.n() - 1;
  const double qhat = 1.0 / (r * r + g.manifold.k);
  const double a = (j.q - qhat) / qhat;
  const double b = (j.w - r * r) / (r * r);
  return std::sqrt(a * a + m * b * b);
}

RadialProfile frame_deviation_profile(const RadialMetric& g) {
  return RadialProfile([g](double r) { return Jet{frame_deviation(g, r), 0.0, 0.0}; });
}

}  // namespace vrmass
