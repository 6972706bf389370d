#include "vrmass/mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrmass/errors.hpp"

namespace vrmass {
namespace {

// Flux of (∇̂^i e_ij - ∇̂_j tr_ĝ e) through the coordinate sphere at r for a
// radial symmetric tensor e = a dr² + b h.
template <class T>
T flux_formula(T r, T a, T b, T b1, int n, int k, double vol) {
  using std::pow;
  using std::sqrt;
  const double m = n - 1;
  const T big_q = 1.0 / (r * r + static_cast<double>(k));
  const T big_w = r * r;
  const T big_w1 = 2.0 * r;
  const T bracket = (big_w1 / (2.0 * big_w)) * (a / big_q - b / big_w) -
                    (b1 / big_w - b * big_w1 / (big_w * big_w));
  return vol * m * pow(big_w, 0.5 * m) / sqrt(big_q) * bracket;
}

}  // namespace

double surface_term(const RadialMetric& g, double R) {
  g.check_domain(R);
  const Jet q = g.q(R);
  const Jet w = g.w(R);
  const Jet qh = reference_q(g.manifold.k)(R);
  return flux_formula<double>(R, q.v - qh.v, w.v - R * R, w.d1 - 2.0 * R, g.n(), g.manifold.k,
                              g.manifold.cross_section_volume);
}

double surface_term_derivative(const RadialMetric& g, double r) {
  g.check_domain(r);
  const Jet q = g.q(r);
  const Jet w = g.w(r);
  const Jet qh = reference_q(g.manifold.k)(r);
  const Dual dr{r, 1.0};
  const Dual a{q.v - qh.v, q.d1 - qh.d1};
  const Dual b{w.v - r * r, w.d1 - 2.0 * r};
  const Dual b1{w.d1 - 2.0 * r, w.d2 - 2.0};
  return flux_formula<Dual>(dr, a, b, b1, g.n(), g.manifold.k, g.manifold.cross_section_volume).e;
}

double perturbation_surface_term(const RadialMetric& g, const SymmetricPerturbation& h, double R) {
  g.check_domain(R);
  const Jet a = h.h_rr(R);
  const Jet b = h.h_tan(R);
  return flux_formula<double>(R, a.v, b.v, b.d1, g.n(), g.manifold.k,
                              g.manifold.cross_section_volume);
}

double volume_discrepancy_density(const RadialMetric& g, double r) {
  g.check_domain(r);
  const double m = g.n() - 1;
  const double q = g.q.value(r);
  const double w = g.w.value(r);
  const double qhat = 1.0 / (r * r + g.manifold.k);
  const double what = r * r;
  const double log_ratio = 0.5 * std::log1p((q - qhat) / qhat) + 0.5 * m * std::log1p((w - what) / what);
  return g.manifold.cross_section_volume * std::sqrt(qhat) * std::pow(r, m) * std::expm1(log_ratio);
}

std::vector<double> metric_breakpoints(const RadialMetric& g) {
  std::vector<double> out;
  for (const auto* p : {&g.q, &g.w})
    for (double f : p->features())
      if (f < 1e3) out.push_back(f);
  if (g.horizon && g.manifold.has_boundary()) {
    const double gap = g.domain_start() - *g.horizon;
    for (double step = 2.0 * gap; step < 2.0 * g.domain_start(); step *= 2.0)
      out.push_back(*g.horizon + step);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double default_cutoff_start(const RadialMetric& g) {
  double start = std::max(16.0, 8.0 * g.domain_start());
  for (double f : metric_breakpoints(g)) start = std::max(start, 2.0 * f);
  return start;
}

double renormalised_volume(const RadialMetric& g, double R, double tol) {
  const auto bps = metric_breakpoints(g);
  return integrate_radial([&g](double r) { return volume_discrepancy_density(g, r); },
                          g.domain_start(), R, tol, bps);
}

MassReport mass_vr(const RadialMetric& g, const MassOptions& opts) {
  const int n = g.n();
  if (!(g.tau > 0.5 * (n - 1)))
    throw ValidationError("mass_vr: decay rate tau must exceed (n-1)/2");
  if (opts.cutoffs < 3) throw ValidationError("mass_vr: need at least 3 cutoffs");
  MassReport rep;
  const double r_start = opts.r_start > 0.0 ? opts.r_start : default_cutoff_start(g);
  const auto bps = metric_breakpoints(g);
  auto vol_density = [&g](double r) { return volume_discrepancy_density(g, r); };

  double volume = integrate_radial(vol_density, g.domain_start(), r_start, opts.tol, bps);
  double prev_R = r_start;
  for (int j = 0; j < opts.cutoffs; ++j) {
    const double R = r_start * std::ldexp(1.0, j);
    if (j > 0) volume += integrate_radial(vol_density, prev_R, R, opts.tol, bps);
    prev_R = R;
    const double s = surface_term(g, R);
    rep.surface_samples.emplace_back(R, s);
    rep.volume_samples.emplace_back(R, volume);
    rep.combined_samples.emplace_back(R, s + 2.0 * (n - 1) * volume);
  }

  if (g.manifold.has_boundary()) {
    const double man_vol = g.manifold.cross_section_volume;
    const double m = n - 1;
    const int k = g.manifold.k;
    rep.reference_core_volume = integrate_radial(
        [=](double r) { return man_vol * std::pow(r, m) / std::sqrt(r * r + k); },
        g.manifold.r_k(), g.domain_start(), opts.tol);
  }

  auto excess = [&g](double r) { return std::abs(scalar_excess(g, r)) * volume_density(g, r); };
  const double r_last = rep.combined_samples.back().first;
  try {
    const double core = integrate_radial(excess, g.domain_start(), r_last, opts.tol, bps);
    const double tail = integrate_radial(excess, r_last, std::numeric_limits<double>::infinity(),
                                         opts.tol);
    rep.scalar_integrability = core + tail;
    rep.extrapolation = extrapolate_limit(rep.combined_samples, 1.0);
    rep.integrability_ok = std::abs(tail) <= 1e-4 * std::max(1.0, std::abs(rep.extrapolation.limit));
  } catch (const NonConvergentTail&) {
    rep.scalar_integrability = std::numeric_limits<double>::infinity();
    rep.integrability_ok = false;
  }
  if (!rep.integrability_ok) {
    rep.mass = std::numeric_limits<double>::quiet_NaN();
    rep.error_estimate = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.mass = rep.extrapolation.limit;
  rep.error_estimate = rep.extrapolation.error_estimate;
  return rep;
}

double constraint_integral(const RadialMetric& g, const RadialProfile& f, double tol) {
  const auto bps = metric_breakpoints(g);
  return integrate_radial(
      [&](double r) { return f.value(r) * scalar_excess(g, r) * volume_density(g, r); },
      g.domain_start(), std::numeric_limits<double>::infinity(), tol, bps);
}

double regularised_hamiltonian(const RadialMetric& g, const RadialProfile& f, double tol) {
  const int n = g.n();
  auto bps = metric_breakpoints(g);
  for (double b : f.features())
    if (b < 1e3) bps.push_back(b);
  std::sort(bps.begin(), bps.end());
  auto integrand = [&](double r) {
    const double constraint = f.value(r) * scalar_excess(g, r) * volume_density(g, r);
    return surface_term_derivative(g, r) + 2.0 * (n - 1) * volume_discrepancy_density(g, r) -
           constraint;
  };
  // The integrand is O(r^{-2}) with cancelling O(1) pieces, so rounding
  // swamps a direct semi-infinite sum; use the mass cutoffs and extrapolate.
  const MassOptions defaults;
  const double r_start = default_cutoff_start(g);
  double running = g.manifold.has_boundary() ? surface_term(g, g.domain_start()) : 0.0;
  double lo = g.domain_start();
  std::vector<std::pair<double, double>> samples;
  for (int j = 0; j < defaults.cutoffs; ++j) {
    const double R = r_start * std::ldexp(1.0, j);
    running += integrate_radial(integrand, lo, R, tol, bps);
    lo = R;
    samples.emplace_back(R, running);
  }
  return extrapolate_limit(samples, 1.0).limit;
}

}  // namespace vrmass
