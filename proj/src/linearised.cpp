#include "vrmass/linearised.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrmass/mass.hpp"

namespace vrmass {
namespace {

double area(const RadialMetric& g, double w) {
  return g.manifold.cross_section_volume * std::pow(w, 0.5 * (g.n() - 1));
}

std::vector<double> joint_breakpoints(const RadialMetric& g, const RadialProfile& f,
                                      const SymmetricPerturbation& h) {
  auto out = metric_breakpoints(g);
  for (const auto* p : {&f, &h.h_rr, &h.h_tan})
    for (double b : p->features())
      if (b < 1e3) out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double constraint_density(const RadialMetric& g, double r) {
  return scalar_excess(g, r) * volume_density(g, r);
}

double linearised_scalar(const RadialMetric& g, const SymmetricPerturbation& h, double r) {
  const auto j = metric_jet(g, r);
  const Jet a = h.h_rr(r);
  const Jet b = h.h_tan(r);
  const MetricJet<Dual> dj{{j.q, a.v}, {j.q1, a.d1}, {j.w, b.v}, {j.w1, b.d1}, {j.w2, b.d2}};
  return formulas::scalar_curvature(dj, g.n(), g.manifold.k).e;
}

double laplacian(const RadialMetric& g, const RadialProfile& f, double r) {
  const auto j = metric_jet(g, r);
  const Jet u = f(r);
  const double m = g.n() - 1;
  return (u.d2 - j.q1 * u.d1 / (2.0 * j.q)) / j.q + m * j.w1 / (2.0 * j.q * j.w) * u.d1;
}

RadialTensor adjoint_linearised_scalar(const RadialMetric& g, const RadialProfile& f, double r) {
  const auto j = metric_jet(g, r);
  const Jet u = f(r);
  const auto c = curvature_fields(g, r);
  const double lap = laplacian(g, f, r);
  return {-lap * j.q + (u.d2 - j.q1 * u.d1 / (2.0 * j.q)) - u.v * c.ric_rr,
          -lap * j.w + j.w1 / (2.0 * j.q) * u.d1 - u.v * c.ric_tan};
}

double contract(const RadialMetric& g, const RadialTensor& s, const RadialTensor& t, double r) {
  const auto j = metric_jet(g, r);
  const double m = g.n() - 1;
  return s.rr * t.rr / (j.q * j.q) + m * s.tan * t.tan / (j.w * j.w);
}

double trace(const RadialMetric& g, const RadialTensor& t, double r) {
  const auto j = metric_jet(g, r);
  return t.rr / j.q + (g.n() - 1) * t.tan / j.w;
}

double frame_norm(const RadialMetric& g, const RadialTensor& t, double r) {
  return std::sqrt(contract(g, t, t, r));
}

double linearised_constraint_density(const RadialMetric& g, const SymmetricPerturbation& h,
                                     double r) {
  const RadialTensor ht{h.h_rr.value(r), h.h_tan.value(r)};
  return (linearised_scalar(g, h, r) + 0.5 * trace(g, ht, r) * scalar_excess(g, r)) *
         volume_density(g, r);
}

double adjoint_pairing_density(const RadialMetric& g, const RadialProfile& f,
                               const SymmetricPerturbation& h, double r) {
  const RadialTensor ht{h.h_rr.value(r), h.h_tan.value(r)};
  const double pairing = contract(g, ht, adjoint_linearised_scalar(g, f, r), r) +
                         0.5 * f.value(r) * scalar_excess(g, r) * trace(g, ht, r);
  return pairing * volume_density(g, r);
}

double flux_term(const RadialMetric& g, const RadialProfile& f, const SymmetricPerturbation& h,
                 double r) {
  const auto j = metric_jet(g, r);
  const Jet u = f(r);
  const Jet a = h.h_rr(r);
  const Jet b = h.h_tan(r);
  const double m = g.n() - 1;
  const double tr = a.v / j.q + m * b.v / j.w;
  const double tr1 = a.d1 / j.q - a.v * j.q1 / (j.q * j.q) + m * (b.d1 / j.w - b.v * j.w1 / (j.w * j.w));
  const double div_r = (a.d1 - j.q1 * a.v / j.q) / j.q + (m * j.w1 / (2.0 * j.w)) * (a.v / j.q - b.v / j.w);
  const double b_r = u.v * (div_r - tr1) - a.v * u.d1 / j.q + tr * u.d1;
  return area(g, j.w) * b_r / std::sqrt(j.q);
}

double adjoint_identity_defect(const RadialMetric& g, const RadialProfile& f,
                               const SymmetricPerturbation& h, double r1, double r2, double tol) {
  const double bulk = integrate_radial(
      [&](double r) {
        return f.value(r) * linearised_constraint_density(g, h, r) -
               adjoint_pairing_density(g, f, h, r);
      },
      r1, r2, tol, joint_breakpoints(g, f, h));
  return std::abs(bulk - (flux_term(g, f, h, r2) - flux_term(g, f, h, r1)));
}

double linearised_mean_curvature(const RadialMetric& g, const SymmetricPerturbation& h, double r) {
  const auto j = metric_jet(g, r);
  const Jet a = h.h_rr(r);
  const Jet b = h.h_tan(r);
  const double m = g.n() - 1;
  return (m / (2.0 * std::sqrt(j.q))) * (b.d1 / j.w - j.w1 * b.v / (j.w * j.w)) -
         (m * j.w1 / (4.0 * j.w)) * a.v * std::pow(j.q, -1.5);
}

double linearised_mean_curvature_boundary_form(const RadialMetric& g,
                                               const SymmetricPerturbation& h, double r) {
  const auto j = metric_jet(g, r);
  const Jet a = h.h_rr(r);
  const Jet b = h.h_tan(r);
  const double m = g.n() - 1;
  const double tr1 = a.d1 / j.q - a.v * j.q1 / (j.q * j.q) + m * (b.d1 / j.w - b.v * j.w1 / (j.w * j.w));
  const double div_r = (a.d1 - j.q1 * a.v / j.q) / j.q + (m * j.w1 / (2.0 * j.w)) * (a.v / j.q - b.v / j.w);
  const double k_tan = j.w1 / (2.0 * j.w * std::sqrt(j.q));
  const double k_dot_h = m * k_tan * b.v / j.w;
  return -0.5 * ((div_r - tr1) / std::sqrt(j.q) + k_dot_h);
}

double reduced_boundary_term(const RadialMetric& g, const RadialProfile& f,
                             const SymmetricPerturbation& h, double r) {
  const auto j = metric_jet(g, r);
  const Jet u = f(r);
  const double h_tan = h.h_tan.value(r);
  const double m = g.n() - 1;
  const double k_tan = j.w1 / (2.0 * j.w * std::sqrt(j.q));
  const double dh = linearised_mean_curvature(g, h, r);
  const double density = -2.0 * u.v * dh - u.v * m * k_tan * h_tan / j.w +
                         m * h_tan / j.w * u.d1 / std::sqrt(j.q);
  return area(g, j.w) * density;
}

double hamiltonian_variation(const RadialMetric& g, const RadialProfile& f,
                             const SymmetricPerturbation& h, double tol) {
  const int n = g.n();
  const double bulk = integrate_radial(
      [&](double r) {
        const RadialTensor ht{h.h_rr.value(r), h.h_tan.value(r)};
        return (n - 1) * trace(g, ht, r) * volume_density(g, r) -
               adjoint_pairing_density(g, f, h, r);
      },
      g.domain_start(), std::numeric_limits<double>::infinity(), tol, joint_breakpoints(g, f, h));
  const double boundary =
      g.manifold.has_boundary() ? flux_term(g, f, h, g.domain_start()) : 0.0;
  return bulk + boundary;
}

}  // namespace vrmass
