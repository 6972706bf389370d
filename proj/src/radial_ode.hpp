#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "vrmass/errors.hpp"
#include "vrmass/jet.hpp"

namespace vrmass::detail {

template <std::size_t N>
using State = std::array<double, N>;
using State2 = State<2>;

template <std::size_t N>
struct SampledPath {
  std::vector<double> radii;
  std::vector<State<N>> states;
  /// False when `admissible` rejected a state or the stepper gave up before
  /// the last requested radius; the path then ends at the last good sample.
  bool complete = true;
};

/// Controlled RKF78 integration through the monotone radii `at` (increasing
/// or decreasing), recording the state at each of them. `abs_tol` defaults to
/// `tol`; pass something tiny when the solution is far below unit scale.
template <std::size_t N>
SampledPath<N> integrate_through(
    const std::function<void(const State<N>&, State<N>&, double)>& rhs, State<N> x,
    const std::vector<double>& at, const std::function<bool(const State<N>&)>& admissible = {},
    double tol = 1e-13, std::optional<double> abs_tol = std::nullopt) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(abs_tol.value_or(tol), tol, ode::runge_kutta_fehlberg78<State<N>>());
  SampledPath<N> path;
  path.radii.push_back(at.front());
  path.states.push_back(x);
  for (std::size_t i = 0; i + 1 < at.size(); ++i) {
    const double dt = (at[i + 1] - at[i]) / 4.0;
    try {
      ode::integrate_adaptive(stepper, rhs, x, at[i], at[i + 1], dt);
    } catch (const std::exception&) {
      path.complete = false;
      return path;
    }
    bool finite = true;
    for (double v : x) finite = finite && std::isfinite(v);
    if (!finite || (admissible && !admissible(x))) {
      path.complete = false;
      return path;
    }
    path.radii.push_back(at[i + 1]);
    path.states.push_back(x);
  }
  return path;
}

/// Geometric nodes from a to b (either order) with about `per_decade` per decade.
inline std::vector<double> geometric_nodes(double a, double b, int per_decade) {
  const double decades = std::abs(std::log10(b / a));
  const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = a * std::pow(b / a, static_cast<double>(i) / (count - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

// Decaying mode of (Δ - n) on the reference end, to second order.
inline Jet decaying_mode(int n, int k, double r) {
  const double c = n * static_cast<double>(k) / (n + 3.0);
  const double v = std::pow(r, -n) * (1.0 - c / (r * r));
  const double d1 = -n * std::pow(r, -n - 1.0) + c * (n + 2.0) * std::pow(r, -n - 3.0);
  const double d2 = n * (n + 1.0) * std::pow(r, -n - 2.0) -
                    c * (n + 2.0) * (n + 3.0) * std::pow(r, -n - 4.0);
  return {v, d1, d2};
}

/// Increasing nodes on [lo, hi]. With a horizon at `pole` < lo the nodes are
/// geometric in r - pole up to lo + pole, so that they resolve the
/// (r - pole)-scale structure next to a near-horizon boundary.
inline std::vector<double> radial_nodes(double lo, double hi, int per_decade,
                                        std::optional<double> pole = std::nullopt) {
  if (!pole || lo + *pole >= hi) return geometric_nodes(lo, hi, per_decade);
  std::vector<double> out;
  for (double d : geometric_nodes(lo - *pole, lo, per_decade)) out.push_back(*pole + d);
  const auto rest = geometric_nodes(lo + *pole, hi, per_decade);
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace vrmass::detail
