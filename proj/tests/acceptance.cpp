// Acceptance suite: one PASS/FAIL line per criterion. Criteria can be
// selected by number on the command line; the exit status is nonzero when a
// gating criterion fails. The exploratory comparison never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "vrmass/coercivity.hpp"
#include "vrmass/experiments.hpp"
#include "vrmass/geometry.hpp"
#include "vrmass/linearised.hpp"
#include "vrmass/mass.hpp"
#include "vrmass/vstatic.hpp"

using namespace vrmass;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  bool gating;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

RadialMetric with_bumps(const RadialMetric& base, double cq, double aq, double cw, double aw) {
  auto g = base;
  g.q = g.q + profiles::bump(cq, 0.8, aq);
  g.w = g.w + profiles::bump(cw, 0.9, aw);
  return g;
}

RadialMetric projected_bump(int n, double centre, double amplitude) {
  auto g = reference_metric(RadialManifold::make(n, 1, 1.0));
  g.q = g.q + profiles::bump(centre, 0.8, amplitude / (centre * centre + 1.0));
  return yamabe_project(g).metric;
}

RadialMetric kottler_with_boundary(int n, int k, double m) {
  return schwarzschild_ads(RadialManifold::make(n, k, 1.0), m, true).metric;
}

Outcome reference_consistency() {
  double worst_scal = 0.0, worst_mass = 0.0;
  for (int n : {3, 4, 5})
    for (int k : {-1, 0, 1}) {
      const auto g = reference_metric(RadialManifold::make(n, k, 1.0));
      for (double r : residual_grid(g).nodes)
        worst_scal = std::max(worst_scal, std::abs(curvature_fields(g, r).scal + n * (n - 1.0)));
      worst_mass = std::max(worst_mass, std::abs(mass_vr(g).mass));
    }
  return {worst_scal < 1e-10 && worst_mass < 1e-8,
          fmt("max|scal+n(n-1)| = %.2e, max|m| = %.2e", worst_scal, worst_mass)};
}

Outcome two_formulations() {
  std::vector<std::pair<std::string, RadialMetric>> cases;
  cases.emplace_back("reference", reference_metric(RadialManifold::make(3, 1, 1.0)));
  for (double m : {0.5, 1.0, 2.0}) cases.emplace_back(fmt("kottler m=%g", m), kottler_with_boundary(3, 1, m));
  const double centres[] = {1.5, 2.0, 2.5, 3.0, 3.5};
  for (int i = 0; i < 5; ++i)
    cases.emplace_back(fmt("projected bump %d", i), projected_bump(3 + i % 2, centres[i], 0.02 + 0.01 * i));
  double worst = 0.0;
  std::string where;
  for (const auto& [label, g] : cases) {
    const double d = std::abs(regularised_hamiltonian(g, profiles::constant(1.0)) - mass_vr(g).mass);
    if (d >= worst) {
      worst = d;
      where = label;
    }
  }
  return {worst < 1e-6, fmt("max |H(g,1) - m| = %.2e (%s), %zu metrics", worst, where.c_str(), cases.size())};
}

Outcome compact_mass_law() {
  double worst = 0.0;
  int count = 0;
  for (int n : {3, 4, 5})
    for (int k : {-1, 0, 1}) {
      const auto base = reference_metric(RadialManifold::make(n, k, 1.0));
      const auto g = with_bumps(base, 2.5, 0.02 / (6.25 + k), 2.8, 0.3);
      const double expected = 2.0 * (n - 1) * renormalised_volume(g, 5.0);
      worst = std::max(worst, std::abs(mass_vr(g).mass - expected));
      ++count;
    }
  // Volume changes evaluated independently at 30 digits.
  struct Frozen {
    int n, k;
    double vol, cq, wq, aq, cw, ww, aw, expected;
  };
  const Frozen frozen[] = {
      {3, 1, 4.0 * std::numbers::pi, 3.0, 1.0, 0.02, 3.2, 0.8, 0.5, 25.3427124474003312984},
      {4, -1, 1.0, 3.0, 1.0, 0.01, 3.0, 1.0, 0.0, 3.02026306744996381209},
      {5, 0, 2.0, 2.0, 0.5, 0.0, 2.0, 0.5, -0.3, -11.2296409018824667338},
  };
  double worst_frozen = 0.0;
  for (const auto& c : frozen) {
    auto g = reference_metric(RadialManifold::make(c.n, c.k, c.vol));
    g.q = g.q + profiles::bump(c.cq, c.wq, c.aq);
    g.w = g.w + profiles::bump(c.cw, c.ww, c.aw);
    worst_frozen = std::max(worst_frozen, std::abs(mass_vr(g).mass - c.expected));
  }
  return {worst < 1e-8 && worst_frozen < 1e-8,
          fmt("max |m - 2(n-1) dV| = %.2e over %d metrics, %.2e against 3 independent values", worst, count,
              worst_frozen)};
}

Outcome adjoint_identity() {
  const std::vector<RadialMetric> bases = {
      reference_metric(RadialManifold::make(3, 1, 1.0)), kottler_with_boundary(3, 1, 0.5),
      with_bumps(reference_metric(RadialManifold::make(4, -1, 1.0)), 3.0, 0.004, 3.4, 0.5)};
  const CounterRng rng(20240601);
  double worst = 0.0;
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (std::uint64_t i = 0; i < 20; ++i) {
      auto u = [&](std::uint64_t slot, double lo, double hi) { return rng.uniform(b, 8 * i + slot, lo, hi); };
      const auto f = profiles::bump(u(0, 2.6, 5.0), u(1, 0.4, 1.0), u(2, -1.0, 1.0));
      const SymmetricPerturbation h{profiles::bump(u(3, 2.6, 5.0), u(4, 0.4, 1.0), u(5, -0.5, 0.5)),
                                    profiles::bump(u(6, 2.6, 5.0), u(7, 0.4, 1.0), 1.0)};
      worst = std::max(worst, adjoint_identity_defect(bases[b], f, h, 1.55, 7.0));
    }
  return {worst < 1e-8, fmt("max defect = %.2e over 60 pairs", worst)};
}

template <class F>
double observed_order(F value, double exact, double eps) {
  const double e1 = std::abs((value(eps) - value(-eps)) / (2 * eps) - exact);
  const double e2 = std::abs((value(eps / 2) - value(-eps / 2)) / eps - exact);
  return std::log2(e1 / e2);
}

Outcome linearisation_orders() {
  const auto g = with_bumps(reference_metric(RadialManifold::make(3, 1, 1.0)), 2.5, 0.01, 2.8, 0.3);
  const SymmetricPerturbation h{profiles::bump(2.4, 0.9, 0.3), profiles::bump(2.9, 0.7, 0.6)};
  const auto f = profiles::constant(1.0) + profiles::bump(2.6, 1.0, 0.4);
  double scal_order = 1e9, mean_order = 1e9;
  for (double r : {2.2, 2.7, 3.2}) {
    scal_order = std::min(scal_order, observed_order([&](double e) { return curvature_fields(perturbed(g, h, e), r).scal; },
                                                     linearised_scalar(g, h, r), 0.04));
    mean_order = std::min(mean_order, observed_order([&](double e) { return mean_curvature_data(perturbed(g, h, e), r).H; },
                                                     linearised_mean_curvature(g, h, r), 0.04));
  }
  const double ham_order = observed_order(
      [&](double e) { return regularised_hamiltonian(perturbed(g, h, e), f, 1e-12); },
      hamiltonian_variation(g, f, h, 1e-12), 0.04);
  const double worst = std::min({scal_order, mean_order, ham_order});
  return {worst >= 1.9, fmt("orders: Dscal %.2f, DH %.2f, DHam %.2f", scal_order, mean_order, ham_order)};
}

Outcome vstatic_residuals() {
  double one = 0.0, lapse = 0.0, hyperbolic = 0.0;
  for (int n : {3, 4})
    for (int k : {-1, 0, 1}) {
      const auto g = kottler_with_boundary(n, k, 1.0);
      one = std::max(one, vstatic_residual(g, {profiles::constant(1.0), n - 1.0}).sup_frame_residual);
      lapse = std::max(lapse, vstatic_residual(g, {profiles::kottler_potential(n, k, 1.0), 0.0}).sup_frame_residual);
    }
  for (int n : {3, 4, 5}) {
    const auto g = reference_metric(RadialManifold::make(n, 1, 1.0));
    hyperbolic = std::max(hyperbolic, vstatic_residual(g, {profiles::kottler_potential(n, 1, 0.0), 0.0}).sup_frame_residual);
  }
  return {one < 1e-8 && lapse < 1e-8 && hyperbolic < 1e-8,
          fmt("sup residual: kottler f=1 %.2e, kottler lapse %.2e, hyperbolic lapse %.2e", one, lapse, hyperbolic)};
}

double max_abs_raw(const CriticalityReport& rep) {
  double worst = 0.0;
  for (const auto& m : rep.members) worst = std::max(worst, std::abs(m.raw));
  return worst;
}

Outcome no_boundary_criticality() {
  const auto ref = reference_metric(RadialManifold::make(3, 1, 1.0));
  const StaticData one{profiles::constant(1.0), 2.0};
  const auto rep = test_critical_no_boundary(ref, bump_family(ref, {20, 1, 0.0, 0.0, 0.05}), one);
  const double on_reference = max_abs_raw(rep);

  const auto csc = projected_bump(3, 2.0, 0.05);
  const auto other = test_critical_no_boundary(csc, bump_family(csc, {5, 2, 0.0, 0.0, 0.05}), one);
  const double on_csc = max_abs_raw(other);
  return {rep.members.size() == 20 && on_reference <= 1e-4 && on_csc > 1e-2,
          fmt("reference max|dm| = %.2e (20 curves), projected CSC max|dm| = %.2e (5 curves)", on_reference, on_csc)};
}

Outcome boundary_criticality() {
  const auto g = kottler_with_boundary(3, 1, 1.0);
  const auto fb = bounded_static_potential(g, 2.0);
  const auto family = bartnik_preserving_family(g, {10, 1, 0.0, 0.0, 0.05});
  const auto rep = test_critical_with_boundary(g, family, fb);
  int rejected = 0;
  for (const auto& m : rep.members) rejected += m.verdict == Verdict::Rejected;
  const double preserving = max_abs_raw(rep);

  double worst_rel = 0.0, min_rate = 1e300;
  for (const auto& p : bump_family(g, {3, 3, 0.0, 0.0, 0.05})) {
    const auto probe = boundary_term_probe(g, p.h, fb);
    worst_rel = std::max(worst_rel, probe.relative_error);
    min_rate = std::min(min_rate, std::abs(probe.mean_curvature_rate));
  }
  return {rejected == 0 && preserving <= 1e-4 && worst_rel <= 1e-3 && min_rate > 1e-6,
          fmt("preserving max|dm| = %.2e (%zu, %d rejected); violating rel. error %.2e (min |dH| %.1e)",
              preserving, rep.members.size(), rejected, worst_rel, min_rate)};
}

Outcome multiplier_recovery() {
  double worst_res = 0.0, worst_dev = 0.0;
  for (int n : {3, 4, 5})
    for (int k : {-1, 0, 1}) {
      const auto fit = lagrange_multiplier_recovery(reference_metric(RadialManifold::make(n, k, 1.0)));
      worst_res = std::max(worst_res, fit.residual);
      for (double v : fit.values) worst_dev = std::max(worst_dev, std::abs(v - 1.0));
    }
  return {worst_res < 1e-8 && worst_dev < 1e-8, fmt("max residual %.2e, max |f-1| %.2e", worst_res, worst_dev)};
}

Outcome coercivity_scan() {
  const auto cp = coercivity::critical_points(3);
  const bool literal = std::abs(cp.a_plus - 2.0) < 1e-12 && std::abs(cp.a_minus + 4.0 / 3.0) < 1e-12;
  bool scan = true;
  double identity = 0.0;
  for (int n = 3; n <= 10; ++n) {
    const auto rep = coercivity::verify_negativity(n, 0.99);
    const auto r = coercivity::critical_points(n);
    scan = scan && rep.negative && r.a_plus > 0.0 && r.a_minus < -1.0;
    for (double a : rep.a_samples)
      identity = std::max(identity, std::abs(coercivity::p_of_a(a, n) - coercivity::constants(a, 0.5 * a - 1.0, n).c1));
  }
  return {literal && scan && identity < 1e-12,
          fmt("n=3 roots a+ = %.6f, a- = %.6f (expected 2, -4/3); sign scan %s; max|c1-p| = %.1e", cp.a_plus,
              cp.a_minus, scan ? "negative" : "violated", identity)};
}

Outcome exploratory_comparison() {
  const auto gamma = kottler_with_boundary(3, 1, 1.0);
  const auto competitors = matched_competitors(gamma, {10, 11, 0.0, 0.0, 0.05});
  const auto table = mass_comparison(gamma, competitors, 1e-4, 1e-8);
  int below = 0, excluded = 0;
  double lowest = 1e300, highest = -1e300;
  for (const auto& row : table.rows) {
    if (row.excluded) {
      ++excluded;
      continue;
    }
    below += row.below_reference;
    lowest = std::min(lowest, row.mass - table.reference_mass);
    highest = std::max(highest, row.mass - table.reference_mass);
  }
  return {table.rows.size() == 10 && excluded == 0 && below == 0,
          fmt("m(gamma) = %.6f; %zu competitors, %d excluded, %d below; excess in [%.2e, %.2e]",
              table.reference_mass, table.rows.size(), excluded, below, lowest, highest)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "reference consistency", 10, true, reference_consistency},
      {2, "two-formulation agreement", 120, true, two_formulations},
      {3, "compact-deformation mass law", 30, true, compact_mass_law},
      {4, "adjoint identity", 60, true, adjoint_identity},
      {5, "linearisation orders", 120, true, linearisation_orders},
      {6, "V-static residuals", 30, true, vstatic_residuals},
      {7, "no-boundary criticality", 600, true, no_boundary_criticality},
      {8, "boundary criticality", 600, true, boundary_criticality},
      {9, "multiplier recovery", 60, true, multiplier_recovery},
      {10, "coercivity scan", 1, true, coercivity_scan},
      {11, "exploratory comparison", 900, false, exploratory_comparison},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int gating_failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass && c.gating) ++gating_failures;
    std::printf("%s %2d %-30s %s [%.1f s / %.0f s%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                seconds, c.budget_seconds, in_time ? "" : " over budget", c.gating ? "" : " (exploratory)");
    std::fflush(stdout);
  }
  return gating_failures == 0 ? 0 : 1;
}
