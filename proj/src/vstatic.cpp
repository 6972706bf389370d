#include "vrmass/vstatic.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "radial_ode.hpp"
#include "vrmass/errors.hpp"
#include "vrmass/linearised.hpp"

namespace vrmass {
namespace {

constexpr double kOuterRadius = 1e4;
constexpr int kNodesPerDecade = 400;

double kottler_lapse_sq(int n, int k, double m, double r) {
  return r * r + k - 2.0 * m * std::pow(r, 2.0 - n);
}

// f'' from the trace equation Δf = n (f - level).
double trace_second_derivative(const MetricJet<double>& j, int n, double level, double f,
                               double f1) {
  const double m = n - 1;
  return j.q * n * (f - level) + j.q1 * f1 / (2.0 * j.q) - m * j.w1 * f1 / (2.0 * j.w);
}

double table_start(const RadialMetric& g) { return residual_grid(g, 2e3, 1).r_min; }

}  // namespace

std::optional<double> kottler_horizon(int n, int k, double m) {
  if (!(m > 0.0)) return std::nullopt;
  auto lapse = [=](double r) { return kottler_lapse_sq(n, k, m, r); };
  double lo = 1e-3 * std::pow(2.0 * m, 1.0 / n);
  while (lapse(lo) >= 0.0) lo *= 0.5;
  double hi = std::max(1.0, 2.0 * std::pow(2.0 * m, 1.0 / n));
  while (lapse(hi) <= 0.0) hi *= 2.0;
  boost::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(lapse, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(52),
                                                  iters);
  return 0.5 * (a + b);
}

KottlerModel schwarzschild_ads(const RadialManifold& man, double m, bool with_boundary,
                               double eta_rel) {
  if (!(m >= 0.0)) throw ValidationError("schwarzschild_ads: mass parameter must be >= 0");
  const int n = man.n;
  const int k = man.k;
  const auto horizon = kottler_horizon(n, k, m);
  RadialManifold out = man;
  if (with_boundary) {
    if (!horizon) throw ValidationError("schwarzschild_ads: no horizon for a boundary to sit on");
    if (!(eta_rel > 0.0)) throw ValidationError("schwarzschild_ads: eta_rel must be positive");
    out.inner_radius = *horizon * (1.0 + eta_rel);
  } else if (horizon && man.inner_radius && *man.inner_radius <= *horizon) {
    throw ValidationError("schwarzschild_ads: inner radius lies inside the horizon");
  }
  RadialProfile q;
  if (m == 0.0) {
    q = reference_q(k);
  } else {
    q = RadialProfile([n, k, m](double r) {
      const double p = kottler_lapse_sq(n, k, m, r);
      const double p1 = 2.0 * r - 2.0 * m * (2.0 - n) * std::pow(r, 1.0 - n);
      const double p2 = 2.0 - 2.0 * m * (2.0 - n) * (1.0 - n) * std::pow(r, -static_cast<double>(n));
      return Jet{1.0 / p, -p1 / (p * p), 2.0 * p1 * p1 / (p * p * p) - p2 / (p * p)};
    });
    q.with_decay(n);
  }
  return {RadialMetric{out, q, reference_w(), static_cast<double>(n), horizon}, horizon};
}

LogGrid residual_grid(const RadialMetric& g, double r_max, int per_decade) {
  const double start = g.domain_start();
  double lo;
  if (g.manifold.has_boundary())
    lo = start;
  else if (g.horizon && *g.horizon >= start)
    lo = *g.horizon * (1.0 + 1e-2);
  else
    lo = start + 1e-2 * std::max(1.0, start);
  return LogGrid::make(lo, r_max, per_decade);
}

VStaticResidualReport vstatic_residual(const RadialMetric& g, const StaticData& sd,
                                       const LogGrid& grid, double delta) {
  VStaticResidualReport rep;
  rep.delta = delta;
  for (double r : grid.nodes) {
    const RadialTensor a = adjoint_linearised_scalar(g, sd.f, r);
    const auto j = metric_jet(g, r);
    const double res = frame_norm(g, {a.rr - sd.lambda * j.q, a.tan - sd.lambda * j.w}, r);
    rep.radii.push_back(r);
    rep.frame_residuals.push_back(res);
    rep.sup_frame_residual = std::max(rep.sup_frame_residual, res);
    rep.weighted_residual = std::max(rep.weighted_residual, std::pow(r, delta) * res);
  }
  const int n = g.n();
  rep.trace_residual_profile = RadialProfile([g, sd, n](double r) {
    const double v = (1.0 - n) * (laplacian(g, sd.f, r) - n * sd.f.value(r) +
                                  n * sd.lambda / (n - 1.0));
    return Jet{v, 0.0, 0.0};
  });
  return rep;
}

VStaticResidualReport vstatic_residual(const RadialMetric& g, const StaticData& sd) {
  return vstatic_residual(g, sd, residual_grid(g));
}

TraceSolution solve_trace_equation(const RadialMetric& g, std::optional<double> boundary_value,
                                   double asymptote) {
  if (!g.manifold.has_boundary()) {
    if (boundary_value)
      throw ValidationError("solve_trace_equation: boundary value given without an inner boundary");
    return {profiles::constant(asymptote), asymptote, 0.0};
  }
  if (!boundary_value)
    throw ValidationError("solve_trace_equation: an inner boundary needs a boundary value");
  const int n = g.n();
  const int k = g.manifold.k;
  const double r0 = g.domain_start();

  // Decaying solution u of (Δ - n)u = 0, integrated inward where it is stable.
  auto nodes = detail::radial_nodes(r0, kOuterRadius, kNodesPerDecade, g.horizon);
  std::reverse(nodes.begin(), nodes.end());
  const Jet seed = detail::decaying_mode(n, k, kOuterRadius);
  auto rhs = [&g, n](const detail::State2& x, detail::State2& dx, double r) {
    const auto j = metric_jet(g, r);
    dx[0] = x[1];
    dx[1] = trace_second_derivative(j, n, 0.0, x[0], x[1]);
  };
  const auto path = detail::integrate_through<2>(rhs, {seed.v, seed.d1}, nodes);
  if (!path.complete) throw ConvergenceError("solve_trace_equation: integration failed");

  const double scale = (*boundary_value - asymptote) / path.states.back()[0];
  std::vector<double> radii(path.radii.rbegin(), path.radii.rend());
  std::vector<Jet> jets;
  for (auto it = path.states.rbegin(); it != path.states.rend(); ++it) {
    const double r = radii[jets.size()];
    const auto j = metric_jet(g, r);
    const double u2 = trace_second_derivative(j, n, 0.0, (*it)[0], (*it)[1]);
    jets.push_back({asymptote + scale * (*it)[0], scale * (*it)[1], scale * u2});
  }
  const RadialProfile table = profiles::quintic_hermite(radii, jets);
  // f'' comes from the equation at the interpolated (f, f'): integrator noise
  // between nodes would otherwise dominate the second derivative.
  RadialProfile f(
      [table, g, n, k, asymptote, scale](double r) {
        Jet x;
        if (r <= kOuterRadius) {
          x = table(r);
        } else {
          const Jet p = detail::decaying_mode(n, k, r);
          x = {asymptote + scale * p.v, scale * p.d1, 0.0};
        }
        x.d2 = trace_second_derivative(metric_jet(g, r), n, asymptote, x.v, x.d1);
        return x;
      },
      RadialProfile::Kind::Sampled);
  f.with_decay(n).with_features({r0, kOuterRadius});
  TraceSolution sol{f, jets.back().v, 0.0};

  // Consistency of the interpolated second derivative with the equation.
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double r = 0.5 * (radii[i] + radii[i + 1]);
    const Jet x = table(r);
    const double res = x.d2 - f(r).d2;
    sol.ode_residual = std::max(sol.ode_residual, std::abs(res) / std::max(1.0, std::abs(x.v)));
  }
  return sol;
}

RadialVStaticSolution solve_radial_vstatic(const RadialManifold& man, const RadialInitialData& data,
                                           double lambda, double r_max) {
  if (!(data.w0 > 0.0)) throw ValidationError("solve_radial_vstatic: w0 must be positive");
  if (data.w0_prime == 0.0) throw ValidationError("solve_radial_vstatic: dw/ds must be nonzero");
  const int n = man.n;
  const int k = man.k;
  const double m = n - 1;
  const double r0 = std::sqrt(data.w0);
  if (!(r_max > r0)) throw ValidationError("solve_radial_vstatic: r_max must exceed sqrt(w0)");
  const auto inner = RadialManifold::make(n, k, man.cross_section_volume, r0);

  const double psi0 = std::pow(data.w0_prime / (2.0 * r0), 2);
  const double level = lambda / (n - 1.0);
  // State (ψ, f, f') with ψ = 1/q in the areal gauge.
  auto psi_slope = [=](double psi, double r) { return (m - 1.0) * (k - psi) / r + n * r; };
  auto f_second = [=](double psi, double psi1, double f, double f1, double r) {
    return n * (f - level) / psi - psi1 * f1 / (2.0 * psi) - m * f1 / r;
  };
  auto rhs = [&](const detail::State<3>& x, detail::State<3>& dx, double r) {
    const double psi1 = psi_slope(x[0], r);
    dx[0] = psi1;
    dx[1] = x[2];
    dx[2] = f_second(x[0], psi1, x[1], x[2], r);
  };
  auto admissible = [](const detail::State<3>& x) {
    return x[0] > 1e-12 && std::abs(x[1]) < 1e12;
  };
  const auto nodes = detail::geometric_nodes(r0, r_max, kNodesPerDecade);
  const auto path = detail::integrate_through<3>(
      rhs, {psi0, data.f0, data.f0_prime / std::sqrt(psi0)}, nodes, admissible);
  if (path.radii.size() < 2)
    throw ConvergenceError("solve_radial_vstatic: integration failed at the first step");

  auto psi_second = [=](double psi, double psi1, double r) {
    return (m - 1.0) * (-psi1 / r - (k - psi) / (r * r)) + n;
  };
  std::vector<Jet> psi_jets, f_jets;
  for (std::size_t i = 0; i < path.radii.size(); ++i) {
    const double r = path.radii[i];
    const auto& x = path.states[i];
    const double psi1 = psi_slope(x[0], r);
    psi_jets.push_back({x[0], psi1, psi_second(x[0], psi1, r)});
    f_jets.push_back({x[1], x[2], f_second(x[0], psi1, x[1], x[2], r)});
  }
  // Tables for ψ and (f, f'); all higher derivatives come from the equations.
  const RadialProfile psi_table = profiles::quintic_hermite(path.radii, psi_jets);
  const RadialProfile f_table = profiles::quintic_hermite(path.radii, f_jets);
  RadialProfile q(
      [=](double r) {
        const double psi = psi_table.value(r);
        const double psi1 = psi_slope(psi, r);
        const double psi2 = psi_second(psi, psi1, r);
        return Jet{1.0 / psi, -psi1 / (psi * psi),
                   2.0 * psi1 * psi1 / (psi * psi * psi) - psi2 / (psi * psi)};
      },
      RadialProfile::Kind::Sampled);
  RadialProfile f(
      [=](double r) {
        const double psi = psi_table.value(r);
        Jet x = f_table(r);
        x.d2 = f_second(psi, psi_slope(psi, r), x.v, x.d1, r);
        return x;
      },
      RadialProfile::Kind::Sampled);
  q.with_features({r0, path.radii.back()});
  f.with_features({r0, path.radii.back()});
  RadialVStaticSolution sol{
      RadialMetric{inner, q, reference_w(), static_cast<double>(n), std::nullopt},
      StaticData{f, lambda},
      r0,
      path.radii.back(),
      !path.complete,
      0.0};
  for (double r : detail::geometric_nodes(r0, sol.r_end, 37)) {
    const RadialTensor a = adjoint_linearised_scalar(sol.metric, sol.data.f, r);
    const double w = sol.metric.w.value(r);
    sol.tangential_residual = std::max(sol.tangential_residual, std::abs(a.tan / w - lambda));
  }
  return sol;
}

StaticData bounded_static_potential(const RadialMetric& g, double lambda) {
  const int n = g.n();
  const double m = n - 1;
  const double level = lambda / m;
  const double lo = table_start(g);
  auto nodes = detail::radial_nodes(lo, kOuterRadius, kNodesPerDecade,
                                    g.manifold.has_boundary() ? g.horizon : std::nullopt);
  std::reverse(nodes.begin(), nodes.end());
  // Radial component of D scal*(f) = λg solved for f'; the growing mode r is
  // damped when integrating inward.
  auto slope = [g, m, lambda](double f, double r) {
    const auto j = metric_jet(g, r);
    return -(2.0 * j.q * j.w / (m * j.w1)) * (lambda + f * formulas::ricci_radial_frame(j, g.n()));
  };
  auto rhs = [&](const detail::State<1>& x, detail::State<1>& dx, double r) {
    dx[0] = slope(x[0], r);
  };
  const auto path = detail::integrate_through<1>(rhs, {level}, nodes);
  if (!path.complete) throw ConvergenceError("bounded_static_potential: integration failed");

  std::vector<double> radii(path.radii.rbegin(), path.radii.rend());
  std::vector<Jet> jets;
  for (double r : radii) {
    const double f = path.states[path.states.size() - 1 - jets.size()][0];
    const double f1 = slope(f, r);
    jets.push_back({f, f1, trace_second_derivative(metric_jet(g, r), n, level, f, f1)});
  }
  const double edge = jets.back().v - level;
  const RadialProfile table = profiles::quintic_hermite(radii, jets);
  // Derivatives from the equations at the interpolated value.
  RadialProfile f(
      [table, g, n, level, edge, slope](double r) {
        const double v = r <= kOuterRadius ? table.value(r)
                                           : level + edge * std::pow(kOuterRadius / r, n);
        const double d1 = slope(v, r);
        return Jet{v, d1, trace_second_derivative(metric_jet(g, r), n, level, v, d1)};
      },
      RadialProfile::Kind::Sampled);
  f.with_decay(n).with_features({radii.front(), kOuterRadius});
  return {f, lambda};
}

ClassificationResult classify_asymptotics(const RadialProfile& f, double lambda, int n,
                                          const LogGrid& grid) {
  if (grid.nodes.size() < 8) throw ValidationError("classify_asymptotics: grid too small");
  ClassificationResult out;
  const std::size_t first = grid.nodes.size() / 2;
  std::vector<std::pair<double, double>> values, slopes;
  for (std::size_t i = first; i < grid.nodes.size(); ++i) {
    const double r = grid.nodes[i];
    const double v = f.value(r);
    values.emplace_back(r, v);
    slopes.emplace_back(r, v / r);
  }
  const double r_hi = values.back().first;
  const double f_hi = values.back().second;
  out.growth_slope = extrapolate_limit(slopes).limit;
  if (std::abs(out.growth_slope) * r_hi > 0.5 * std::abs(f_hi)) {
    out.branch = Branch::LinearGrowth;
    out.limit_value = out.growth_slope;
    return out;
  }
  out.limit_value = extrapolate_limit(values).limit;
  const double limit = out.limit_value;
  const auto decay = estimate_decay_rate([&f, limit](double r) { return f.value(r) - limit; }, grid);
  out.fitted_rate = decay.fitted_rate.value_or(std::numeric_limits<double>::infinity());
  out.branch = out.fitted_rate > 0.05 ? Branch::AsymptoticallyConstant : Branch::Ambiguous;
  const double level = lambda / (n - 1.0);
  out.limit_matches_lambda = std::abs(limit - level) <= 1e-3 * std::max(1.0, std::abs(limit));
  return out;
}

}  // namespace vrmass
