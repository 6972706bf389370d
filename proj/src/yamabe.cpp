#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "radial_ode.hpp"
#include "vrmass/errors.hpp"
#include "vrmass/vstatic.hpp"

namespace vrmass {
namespace {

// Start of the outward integration on a complete k = 1 end; below it the
// factor is continued by its even Taylor polynomial.
constexpr double kOriginOffset = 1e-4;

struct Conformal {
  int n;
  double c_n;  // 4(n-1)/(n-2)
  double p;    // (n+2)/(n-2)

  explicit Conformal(int dim)
      : n(dim), c_n(4.0 * (dim - 1.0) / (dim - 2.0)), p((dim + 2.0) / (dim - 2.0)) {}

  // v'' for u = 1 + v solving c_n Δu = scal·u + n(n-1) u^p. Working with v
  // keeps the far-field amplitude, which sits far below the rounding of 1 + v.
  double second(const RadialMetric& g, double r, double v, double v1) const {
    const auto j = metric_jet(g, r);
    const double m = n - 1;
    const double nn = n * (n - 1.0);
    const double scal = formulas::scalar_curvature(j, n, g.manifold.k);
    const double source = scalar_excess(g, r) + scal * v + nn * std::expm1(p * std::log1p(v));
    const double drift = -j.q1 / (2.0 * j.q * j.q) + m * j.w1 / (2.0 * j.q * j.w);
    return j.q * (source / c_n - drift * v1);
  }
};

struct Shooter {
  const RadialMetric& g;
  Conformal eq;
  bool from_origin;
  double start;
  double match;
  double outer;

  detail::State2 inner_seed(double x) const {
    if (!from_origin) return {0.0, x};
    const double a = eq.second(g, start, x, 0.0) / eq.n;
    return {x + 0.5 * a * start * start, a * start};
  }

  detail::State2 outer_seed(double amp) const {
    const Jet phi = detail::decaying_mode(eq.n, g.manifold.k, outer);
    return {amp * phi.v, amp * phi.d1};
  }

  std::function<void(const detail::State2&, detail::State2&, double)> rhs() const {
    return [this](const detail::State2& x, detail::State2& dx, double r) {
      dx[0] = x[1];
      dx[1] = eq.second(g, r, x[0], x[1]);
    };
  }

  static bool positive(const detail::State2& x) { return x[0] > -1.0; }

  // The far-field amplitude can be many orders below unit scale and the
  // inward leg amplifies errors like r^-n, so steps are controlled relatively.
  static constexpr double kRelTol = 1e-13;
  static constexpr double kAbsTol = 1e-30;

  detail::SampledPath<2> outward(double x, const std::vector<double>& nodes) const {
    return detail::integrate_through<2>(rhs(), inner_seed(x), nodes, positive, kRelTol, kAbsTol);
  }
  detail::SampledPath<2> inward(double amp, const std::vector<double>& nodes) const {
    return detail::integrate_through<2>(rhs(), outer_seed(amp), nodes, positive, kRelTol, kAbsTol);
  }

  // Coarse legs for the Newton iteration. Every profile feature is a node so
  // the adaptive stepper cannot stride over a compact perturbation.
  std::vector<double> inner_legs, outer_legs;

  void plan_legs() {
    std::vector<double> feats;
    for (const auto* p : {&g.q, &g.w})
      for (double f : p->features()) feats.push_back(f);
    auto leg = [&feats](double a, double b) {
      auto nodes = detail::geometric_nodes(std::min(a, b), std::max(a, b), 20);
      for (double f : feats)
        if (f > std::min(a, b) && f < std::max(a, b)) nodes.push_back(f);
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      if (a > b) std::reverse(nodes.begin(), nodes.end());
      return nodes;
    };
    inner_legs = leg(start, match);
    outer_legs = leg(outer, match);
  }

  // Mismatch of (v, v') at the matching radius; nullopt if either leg failed.
  std::optional<Eigen::Vector2d> mismatch(const Eigen::Vector2d& z) const {
    const auto a = outward(z(0), inner_legs);
    const auto b = inward(z(1), outer_legs);
    if (!a.complete || !b.complete) return std::nullopt;
    return Eigen::Vector2d(a.states.back()[0] - b.states.back()[0],
                           a.states.back()[1] - b.states.back()[1]);
  }
};

// (1 + v)^alpha from v, so the jets keep the relative precision of v.
RadialProfile one_plus_power(const RadialProfile& v, double alpha) {
  return RadialProfile(
      [v, alpha](double r) {
        const Jet x = v(r);
        const double lg = std::log1p(x.v);
        const double a1 = alpha * std::exp((alpha - 1.0) * lg);
        const double a2 = alpha * (alpha - 1.0) * std::exp((alpha - 2.0) * lg);
        return Jet{std::exp(alpha * lg), a1 * x.d1, a2 * x.d1 * x.d1 + a1 * x.d2};
      },
      v.kind());
}

}  // namespace

YamabeResult yamabe_project(const RadialMetric& g, const YamabeOptions& opts) {
  const int n = g.n();
  const bool from_origin = !g.manifold.has_boundary();
  if (from_origin && g.manifold.k != 1)
    throw ValidationError(
        "yamabe_project: a complete domain needs k = 1; give an inner boundary otherwise");
  const double start = from_origin ? kOriginOffset : g.domain_start();
  const double match = 2.0 * std::max(1.0, start);
  if (!(opts.outer_radius > 2.0 * match))
    throw ValidationError("yamabe_project: outer_radius too small");
  Shooter shoot{g, Conformal(n), from_origin, start, match, opts.outer_radius, {}, {}};
  shoot.plan_legs();

  // Newton on (inner slope or central value, far-field amplitude).
  Eigen::Vector2d z(0.0, 0.0);
  auto f = shoot.mismatch(z);
  if (!f) throw ConvergenceError("yamabe_project: initial shooting failed");
  int it = 0;
  for (; it < opts.max_newton && f->norm() > opts.newton_tol; ++it) {
    Eigen::Matrix2d jac;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d dz = Eigen::Vector2d::Zero();
      dz(c) = 1e-7 * std::max(1.0, std::abs(z(c)));
      const auto fp = shoot.mismatch(z + dz);
      if (!fp) throw ConvergenceError("yamabe_project: factor lost positivity");
      jac.col(c) = (*fp - *f) / dz(c);
    }
    const Eigen::Vector2d step = jac.fullPivLu().solve(-*f);
    double damping = 1.0;
    std::optional<Eigen::Vector2d> next;
    for (int tries = 0; tries < 20; ++tries, damping *= 0.5) {
      next = shoot.mismatch(z + damping * step);
      if (next && next->norm() < f->norm()) break;
      next.reset();
    }
    if (!next) {
      if (f->norm() < 1e3 * opts.newton_tol) break;
      throw ConvergenceError("yamabe_project: Newton iteration stalled");
    }
    z += damping * step;
    f = next;
  }
  if (f->norm() > 1e3 * opts.newton_tol)
    throw ConvergenceError("yamabe_project: Newton iteration did not converge");

  // Dense tables on both legs, with u'' from the equation at every node.
  const auto inner_nodes = detail::radial_nodes(start, match, opts.per_decade,
                                                from_origin ? std::nullopt : g.horizon);
  auto outer_nodes = detail::geometric_nodes(opts.outer_radius, match, opts.per_decade);
  const auto a = shoot.outward(z(0), inner_nodes);
  const auto b = shoot.inward(z(1), outer_nodes);
  if (!a.complete || !b.complete) throw ConvergenceError("yamabe_project: dense pass failed");
  std::vector<double> radii;
  std::vector<Jet> jets;
  auto push = [&](double r, const detail::State2& x) {
    radii.push_back(r);
    jets.push_back({x[0], x[1], shoot.eq.second(g, r, x[0], x[1])});
  };
  for (std::size_t i = 0; i < a.radii.size(); ++i) push(a.radii[i], a.states[i]);
  for (std::size_t i = b.radii.size() - 1; i-- > 0;) push(b.radii[i], b.states[i]);

  const double amp = z(1);
  const int k = g.manifold.k;
  const RadialProfile table = profiles::quintic_hermite(radii, jets);
  const double outer = opts.outer_radius;
  // v = u - 1 is tabulated rather than u: interpolating values rounded near
  // 1 would put noise of order eps/h into u'. v'' is taken from the equation
  // at the interpolated (v, v'), so the projected metric is CSC up to
  // rounding rather than up to table error.
  RadialProfile v(
      [table, outer, n, k, amp, eq = shoot.eq, gc = g](double r) {
        Jet x;
        if (r <= outer) {
          x = table(r);
        } else {
          const Jet phi = detail::decaying_mode(n, k, r);
          x = {amp * phi.v, amp * phi.d1, 0.0};
        }
        x.d2 = eq.second(gc, r, x.v, x.d1);
        return x;
      },
      RadialProfile::Kind::Sampled);
  v.with_decay(n).with_features({start, outer});
  if (from_origin) {
    const double centre = z(0);
    const double curv = shoot.eq.second(g, start, centre, 0.0) / n;
    RadialProfile core([centre, curv](double r) {
      return Jet{centre + 0.5 * curv * r * r, curv * r, curv};
    });
    v = profiles::spliced(core, v, start);
  }

  const RadialProfile scale = one_plus_power(v, 4.0 / (n - 2.0));
  const RadialProfile u = profiles::constant(1.0) + v;
  RadialMetric out = g;
  out.q = scale * g.q;
  out.w = scale * g.w;
  YamabeResult res{out, u, it, f->norm(), 0.0};
  if (g.manifold.has_boundary())
    res.mean_curvature_drift =
        mean_curvature_data(out, start).H - mean_curvature_data(g, start).H;
  return res;
}

}  // namespace vrmass
