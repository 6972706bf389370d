#include "vrmass/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "radial_ode.hpp"
#include "vrmass/errors.hpp"
#include "vrmass/linearised.hpp"

namespace vrmass {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs fn(i) for i in [0, count) on `jobs` threads; results are written by
// index, so the outcome does not depend on scheduling. The first failure in
// index order is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < count; i += stride) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RadialProfile richardson_rate(const RadialProfile& plus, const RadialProfile& minus,
                              const RadialProfile& half_plus, const RadialProfile& half_minus,
                              double t) {
  const RadialProfile coarse = (0.5 / t) * (plus - minus);
  const RadialProfile fine = (1.0 / t) * (half_plus - half_minus);
  return (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
}

double richardson(double plus, double minus, double half_plus, double half_minus, double t) {
  const double coarse = (plus - minus) / (2.0 * t);
  const double fine = (half_plus - half_minus) / t;
  return (4.0 * fine - coarse) / 3.0;
}

double default_centre_lo(const RadialMetric& g) {
  const double s = g.domain_start();
  return g.manifold.has_boundary() ? 1.3 * s : std::max(0.5, 1.5 * s);
}

double default_centre_hi(const RadialMetric& g) {
  return g.manifold.has_boundary() ? 10.0 * g.domain_start() : std::max(8.0, 10.0 * g.domain_start());
}

// Bump of relative size `rel` in each component, centred at c.
SymmetricPerturbation frame_bump(const RadialMetric& g, double c, double rel_rr, double rel_tan) {
  const double half = 0.2 * c;
  return {profiles::bump(c, half, rel_rr * g.q.value(c)),
          profiles::bump(c, half, rel_tan * g.w.value(c))};
}

SymmetricPerturbation combine(const SymmetricPerturbation& a, const SymmetricPerturbation& b,
                              double alpha) {
  return {a.h_rr + alpha * b.h_rr, a.h_tan + alpha * b.h_tan};
}

double inner_mean_curvature(const RadialMetric& g) {
  return mean_curvature_data(g, g.domain_start()).H;
}

struct ProjectedFour {
  YamabeResult plus, minus, half_plus, half_minus;
};

ProjectedFour project_four(const RadialMetric& g, const SymmetricPerturbation& h,
                           const ExperimentOptions& opts) {
  const double t = opts.step;
  return {yamabe_project(perturbed(g, h, t), opts.projection),
          yamabe_project(perturbed(g, h, -t), opts.projection),
          yamabe_project(perturbed(g, h, 0.5 * t), opts.projection),
          yamabe_project(perturbed(g, h, -0.5 * t), opts.projection)};
}

double mean_curvature_rate(const RadialMetric& g, const SymmetricPerturbation& h,
                           const ExperimentOptions& opts) {
  const auto p = project_four(g, h, opts);
  return richardson(inner_mean_curvature(p.plus.metric), inner_mean_curvature(p.minus.metric),
                    inner_mean_curvature(p.half_plus.metric),
                    inner_mean_curvature(p.half_minus.metric), opts.step);
}

double max_constraint_violation(const RadialMetric& g) {
  double worst = 0.0;
  for (double r : residual_grid(g, 1e3, 10).nodes)
    worst = std::max(worst, std::abs(curvature_fields(g, r).scal + g.n() * (g.n() - 1.0)));
  return worst;
}

double checked_mass(const RadialMetric& g, const MassOptions& opts) {
  const auto rep = mass_vr(g, opts);
  if (!rep.integrability_ok) throw ConvergenceError("projected metric failed the integrability check");
  return rep.mass;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t index) const {
  return splitmix64(splitmix64(seed_ ^ splitmix64(stream)) + index);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const {
  return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
}

std::vector<Perturbation> bump_family(const RadialMetric& g, const FamilyOptions& opts) {
  if (opts.count < 1) throw ValidationError("family.count must be >= 1");
  const double lo = opts.centre_lo > 0.0 ? opts.centre_lo : default_centre_lo(g);
  const double hi = opts.centre_hi > 0.0 ? opts.centre_hi : default_centre_hi(g);
  if (!(hi >= lo)) throw ValidationError("family: centre range is empty");
  if (g.manifold.has_boundary() && !(0.8 * lo > g.domain_start()))
    throw ValidationError("family: bumps must stay clear of the inner boundary");
  const CounterRng rng(opts.seed);
  const double m = g.n() - 1;
  std::vector<Perturbation> out;
  for (int i = 0; i < opts.count; ++i) {
    const double s = opts.count > 1 ? static_cast<double>(i) / (opts.count - 1) : 0.0;
    const double c = lo * std::pow(hi / lo, s);
    const double a = rng.uniform(1, i, -opts.amplitude, opts.amplitude);
    const double b = rng.uniform(2, i, -opts.amplitude, opts.amplitude);
    out.push_back({"bump" + std::to_string(i), frame_bump(g, c, a, b), std::sqrt(a * a + m * b * b)});
  }
  return out;
}

CurveDerivative projected_mass_derivative(const RadialMetric& g, const SymmetricPerturbation& h,
                                          const ExperimentOptions& opts) {
  if (!(opts.step > 0.0)) throw ValidationError("step must be positive");
  const double t = opts.step;
  const auto p = project_four(g, h, opts);
  const double mp = checked_mass(p.plus.metric, opts.mass);
  const double mm = checked_mass(p.minus.metric, opts.mass);
  const double hp = checked_mass(p.half_plus.metric, opts.mass);
  const double hm = checked_mass(p.half_minus.metric, opts.mass);
  CurveDerivative d;
  d.coarse = (mp - mm) / (2.0 * t);
  d.fine = (hp - hm) / t;
  d.raw = (4.0 * d.fine - d.coarse) / 3.0;
  d.tangent = {richardson_rate(p.plus.metric.q, p.minus.metric.q, p.half_plus.metric.q,
                               p.half_minus.metric.q, t),
               richardson_rate(p.plus.metric.w, p.minus.metric.w, p.half_plus.metric.w,
                               p.half_minus.metric.w, t)};
  for (const auto* y : {&p.plus, &p.minus, &p.half_plus, &p.half_minus})
    d.constraint_drift = std::max(d.constraint_drift, max_constraint_violation(y->metric));
  if (g.manifold.has_boundary()) {
    const double r0 = g.domain_start();
    d.mean_curvature_rate =
        richardson(inner_mean_curvature(p.plus.metric), inner_mean_curvature(p.minus.metric),
                   inner_mean_curvature(p.half_plus.metric),
                   inner_mean_curvature(p.half_minus.metric), t);
    d.induced_metric_rate =
        richardson(p.plus.metric.w.value(r0), p.minus.metric.w.value(r0),
                   p.half_plus.metric.w.value(r0), p.half_minus.metric.w.value(r0), t);
  }
  return d;
}

bool CriticalityReport::all_critical() const {
  return !members.empty() && std::all_of(members.begin(), members.end(), [](const MemberReport& m) {
    return m.verdict == Verdict::Critical;
  });
}

bool CriticalityReport::any_noncritical() const {
  return std::any_of(members.begin(), members.end(),
                     [](const MemberReport& m) { return m.verdict == Verdict::NonCritical; });
}

CriticalityReport test_critical_no_boundary(const RadialMetric& g,
                                            const std::vector<Perturbation>& family,
                                            const StaticData& potential,
                                            const ExperimentOptions& opts) {
  if (g.manifold.has_boundary())
    throw ValidationError("test_critical_no_boundary: metric has an inner boundary");
  CriticalityReport rep{opts.tol, std::vector<MemberReport>(family.size())};
  parallel_for(family.size(), opts.jobs, [&](std::size_t i) {
    const auto& p = family[i];
    const auto d = projected_mass_derivative(g, p.h, opts);
    MemberReport& m = rep.members[i];
    m.label = p.label;
    m.norm = p.norm;
    m.raw = d.raw;
    m.predicted = hamiltonian_variation(g, potential.f, d.tangent);
    m.constraint_drift = d.constraint_drift;
    m.verdict = std::abs(d.raw) <= opts.tol * (1.0 + p.norm) ? Verdict::Critical : Verdict::NonCritical;
  });
  return rep;
}

CriticalityReport test_critical_with_boundary(const RadialMetric& g,
                                              const std::vector<Perturbation>& family,
                                              const StaticData& potential,
                                              const ExperimentOptions& opts) {
  if (!g.manifold.has_boundary())
    throw ValidationError("test_critical_with_boundary: metric has no inner boundary");
  const double r0 = g.domain_start();
  CriticalityReport rep{opts.tol, std::vector<MemberReport>(family.size())};
  parallel_for(family.size(), opts.jobs, [&](std::size_t i) {
    const auto& p = family[i];
    MemberReport& m = rep.members[i];
    m.label = p.label;
    m.norm = p.norm;
    const double h_tan = p.h.h_tan.value(r0);
    const double dh = linearised_mean_curvature(g, p.h, r0);
    if (std::abs(h_tan) > 1e-10 || std::abs(dh) > 1e-10) {
      m.verdict = Verdict::Rejected;
      m.diagnostic = "perturbation changes the boundary data: h_tan(r0) = " + std::to_string(h_tan) +
                     ", DH[h](r0) = " + std::to_string(dh);
      return;
    }
    const auto d = projected_mass_derivative(g, p.h, opts);
    m.raw = d.raw;
    m.predicted = hamiltonian_variation(g, potential.f, d.tangent);
    m.constraint_drift = d.constraint_drift;
    m.mean_curvature_rate = d.mean_curvature_rate;
    m.induced_metric_rate = d.induced_metric_rate;
    if (std::abs(d.mean_curvature_rate) > 1e-6 || std::abs(d.induced_metric_rate) > 1e-10) {
      m.verdict = Verdict::Rejected;
      m.diagnostic = "projected curve moves the boundary data: dH/dt = " +
                     std::to_string(d.mean_curvature_rate);
      return;
    }
    m.verdict = std::abs(d.raw) <= opts.tol * (1.0 + p.norm) ? Verdict::Critical : Verdict::NonCritical;
  });
  return rep;
}

std::vector<Perturbation> bartnik_preserving_family(const RadialMetric& g,
                                                    const FamilyOptions& family,
                                                    const ExperimentOptions& opts) {
  const auto firsts = bump_family(g, family);
  FamilyOptions second = family;
  second.seed = family.seed ^ 0x5DEECE66DULL;
  const double lo = family.centre_lo > 0.0 ? family.centre_lo : default_centre_lo(g);
  const double hi = family.centre_hi > 0.0 ? family.centre_hi : default_centre_hi(g);
  second.centre_lo = lo * 1.15;
  second.centre_hi = hi * 1.15;
  const auto seconds = bump_family(g, second);
  std::vector<Perturbation> out(firsts.size());
  parallel_for(firsts.size(), opts.jobs, [&](std::size_t i) {
    const double d1 = mean_curvature_rate(g, firsts[i].h, opts);
    const double d2 = mean_curvature_rate(g, seconds[i].h, opts);
    if (d2 == 0.0) throw ConvergenceError("bartnik_preserving_family: degenerate second bump");
    const double alpha = -d1 / d2;
    out[i] = {"pair" + std::to_string(i), combine(firsts[i].h, seconds[i].h, alpha),
              firsts[i].norm + std::abs(alpha) * seconds[i].norm};
  });
  return out;
}

BoundaryProbe boundary_term_probe(const RadialMetric& g, const SymmetricPerturbation& h,
                                  const StaticData& potential, const ExperimentOptions& opts) {
  if (!g.manifold.has_boundary()) throw ValidationError("boundary_term_probe: no inner boundary");
  const auto d = projected_mass_derivative(g, h, opts);
  BoundaryProbe out;
  out.raw = d.raw;
  out.reduced = reduced_boundary_term(g, potential.f, d.tangent, g.domain_start());
  out.relative_error = std::abs(out.raw - out.reduced) / std::max(std::abs(out.reduced), 1e-300);
  out.mean_curvature_rate = d.mean_curvature_rate;
  return out;
}

MultiplierFit lagrange_multiplier_recovery(const RadialMetric& g, const LogGrid& grid) {
  const auto& r = grid.nodes;
  const std::size_t count = r.size();
  if (count < 5) throw ValidationError("lagrange_multiplier_recovery: grid too small");
  const int n = g.n();
  const double m = n - 1;
  const std::size_t unknowns = count - 1;  // f at the outer node is pinned to 1
  const std::size_t rows = 2 * (count - 2);

  // Row layout per interior node: radial frame component, then tangential
  // weighted by sqrt(n-1) so the squared residual is the frame norm squared.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, unknowns);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  struct Stencil { double w[3][3]; };  // [value|d1|d2][left|centre|right]
  std::vector<Stencil> stencils(count);
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double hl = r[i] - r[i - 1];
    const double hr = r[i + 1] - r[i];
    Stencil s{};
    s.w[0][1] = 1.0;
    s.w[1][0] = -hr / (hl * (hl + hr));
    s.w[1][1] = (hr - hl) / (hl * hr);
    s.w[1][2] = hl / (hr * (hl + hr));
    s.w[2][0] = 2.0 / (hl * (hl + hr));
    s.w[2][1] = -2.0 / (hl * hr);
    s.w[2][2] = 2.0 / (hr * (hl + hr));
    stencils[i] = s;
  }
  auto coefficients = [&](std::size_t i) {
    const auto j = metric_jet(g, r[i]);
    const auto c = curvature_fields(g, r[i]);
    // rr/q   = -(m w'/(2 q w)) f' - (ric_rr/q) f
    // tan/w  = -f''/q + (q'/(2q²) - (m-1) w'/(2 q w)) f' - (ric_tan/w) f
    std::array<double, 3> rr{-c.ric_rr / j.q, -m * j.w1 / (2.0 * j.q * j.w), 0.0};
    std::array<double, 3> tan{-c.ric_tan / j.w,
                              j.q1 / (2.0 * j.q * j.q) - (m - 1.0) * j.w1 / (2.0 * j.q * j.w),
                              -1.0 / j.q};
    return std::pair{rr, tan};
  };
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const auto [rr, tan] = coefficients(i);
    const std::size_t row = 2 * (i - 1);
    for (int side = 0; side < 3; ++side) {
      const std::size_t col = i - 1 + side;
      double crr = 0.0, ctan = 0.0;
      for (int d = 0; d < 3; ++d) {
        crr += rr[d] * stencils[i].w[d][side];
        ctan += tan[d] * stencils[i].w[d][side];
      }
      ctan *= std::sqrt(m);
      if (col < unknowns) {
        a(row, col) += crr;
        a(row + 1, col) += ctan;
      } else {
        b(row) -= crr;
        b(row + 1) -= ctan;
      }
    }
    b(row) += m;
    b(row + 1) += std::sqrt(m) * m;
  }

  MultiplierFit fit;
  fit.regularisation = 1e-14 * a.squaredNorm() / static_cast<double>(unknowns);
  Eigen::MatrixXd stacked(rows + unknowns, unknowns);
  Eigen::VectorXd rhs(rows + unknowns);
  stacked << a, std::sqrt(fit.regularisation) * Eigen::MatrixXd::Identity(unknowns, unknowns);
  rhs << b, std::sqrt(fit.regularisation) * Eigen::VectorXd::Ones(unknowns);
  const Eigen::VectorXd x = stacked.colPivHouseholderQr().solve(rhs);
  if (!x.allFinite()) throw ConvergenceError("lagrange_multiplier_recovery: singular system");

  fit.radii = r;
  fit.values.assign(x.data(), x.data() + unknowns);
  fit.values.push_back(1.0);
  const Eigen::VectorXd res = a * x - b;
  for (std::size_t i = 0; i + 1 < count - 1; ++i)
    fit.residual = std::max(fit.residual, std::hypot(res(2 * i), res(2 * i + 1)));
  fit.f = profiles::sampled_log_spline(fit.radii, fit.values);
  return fit;
}

MultiplierFit lagrange_multiplier_recovery(const RadialMetric& g) {
  LogGrid grid = residual_grid(g, 50.0, 40);
  // Near a horizon the potential varies on the scale r - horizon.
  if (g.horizon && *g.horizon < grid.r_min)
    grid.nodes = detail::radial_nodes(grid.r_min, grid.r_max, grid.points_per_decade, g.horizon);
  return lagrange_multiplier_recovery(g, grid);
}

std::vector<Competitor> matched_competitors(const RadialMetric& gamma, const FamilyOptions& family,
                                            const ExperimentOptions& opts) {
  if (!gamma.manifold.has_boundary())
    throw ValidationError("matched_competitors: reference has no inner boundary");
  const auto firsts = bump_family(gamma, family);
  FamilyOptions second = family;
  second.seed = family.seed ^ 0x2545F4914F6CDD1DULL;
  const double lo = family.centre_lo > 0.0 ? family.centre_lo : default_centre_lo(gamma);
  const double hi = family.centre_hi > 0.0 ? family.centre_hi : default_centre_hi(gamma);
  second.centre_lo = lo * 1.15;
  second.centre_hi = hi * 1.15;
  const auto seconds = bump_family(gamma, second);
  const double target = inner_mean_curvature(gamma);

  std::vector<Competitor> out(firsts.size());
  parallel_for(firsts.size(), opts.jobs, [&](std::size_t i) {
    // The bump that moves the inner mean curvature more acts as the
    // corrector, which keeps |α| <= 1 at first order.
    const double d1 = mean_curvature_rate(gamma, firsts[i].h, opts);
    const double d2 = mean_curvature_rate(gamma, seconds[i].h, opts);
    if (d1 == 0.0 && d2 == 0.0) throw ConvergenceError("matched_competitors: degenerate bump pair");
    const bool swap = std::abs(d1) > std::abs(d2);
    const auto& primary = swap ? seconds[i].h : firsts[i].h;
    const auto& corrector = swap ? firsts[i].h : seconds[i].h;
    auto project = [&](double alpha) {
      return yamabe_project(perturbed(gamma, combine(primary, corrector, alpha), 1.0), opts.projection);
    };
    auto mismatch = [&](double alpha) { return inner_mean_curvature(project(alpha).metric) - target; };
    double a0 = swap ? -d2 / d1 : -d1 / d2, f0 = mismatch(a0);
    double a1 = a0 + 0.05 * std::max(std::abs(a0), 0.1), f1 = mismatch(a1);
    for (int it = 0; it < 20 && std::abs(f1) > 1e-11 && f1 != f0; ++it) {
      const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
      a0 = a1;
      f0 = f1;
      a1 = a2;
      f1 = mismatch(a1);
    }
    if (std::abs(f1) > 1e-10)
      throw ConvergenceError("matched_competitors: could not match the inner mean curvature");
    out[i] = {"competitor" + std::to_string(i), project(a1).metric};
  });
  return out;
}

ComparisonTable mass_comparison(const RadialMetric& gamma, const std::vector<Competitor>& competitors,
                                double tol, double boundary_tol, const ExperimentOptions& opts) {
  ComparisonTable table;
  table.tol = tol;
  table.reference_mass = checked_mass(gamma, opts.mass);
  const double r0 = gamma.domain_start();
  const double area = gamma.w.value(r0);
  const double h0 = inner_mean_curvature(gamma);
  table.rows.resize(competitors.size());
  parallel_for(competitors.size(), opts.jobs, [&](std::size_t i) {
    const auto& c = competitors[i];
    ComparisonRow& row = table.rows[i];
    row.label = c.label;
    if (!c.metric.manifold.has_boundary() || c.metric.domain_start() != r0) {
      row.excluded = true;
      row.diagnostic = "inner boundary radius differs from the reference";
      return;
    }
    row.area_mismatch = std::abs(c.metric.w.value(r0) - area) / area;
    row.mean_curvature_mismatch = std::abs(inner_mean_curvature(c.metric) - h0);
    if (row.area_mismatch > boundary_tol || row.mean_curvature_mismatch > boundary_tol) {
      row.excluded = true;
      row.diagnostic = "boundary data not matched: relative area mismatch " +
                       std::to_string(row.area_mismatch) + ", mean curvature mismatch " +
                       std::to_string(row.mean_curvature_mismatch);
      return;
    }
    const auto rep = mass_vr(c.metric, opts.mass);
    row.mass = rep.mass;
    row.mass_error = rep.error_estimate;
    row.below_reference = !(rep.mass >= table.reference_mass - tol);
  });
  return table;
}

}  // namespace vrmass
