#include <doctest.h>

#include <cmath>
#include <limits>

#include "vrmass/geometry.hpp"
#include "vrmass/linearised.hpp"
#include "vrmass/mass.hpp"
#include "vrmass/vstatic.hpp"

using namespace vrmass;

namespace {

double kottler_psi(int n, int k, double m, double r) { return r * r + k - 2 * m * std::pow(r, 2.0 - n); }

}  // namespace

TEST_CASE("Kottler horizon is a root of the lapse") {
  for (int n : {3, 4, 6}) {
    const auto rh = kottler_horizon(n, 1, 0.8);
    REQUIRE(rh);
    CHECK(std::abs(kottler_psi(n, 1, 0.8, *rh)) < 1e-13);
  }
  CHECK_FALSE(kottler_horizon(3, 1, 0.0));
}

TEST_CASE("the Kottler potential is static with zero constant") {
  for (int n : {3, 4, 5})
    for (int k : {-1, 0, 1}) {
      CAPTURE(n);
      CAPTURE(k);
      const auto man = RadialManifold::make(n, k, 1.0);
      const auto model = schwarzschild_ads(man, 0.6, true);
      const StaticData sd{profiles::kottler_potential(n, k, 0.6), 0.0};
      const auto rep = vstatic_residual(model.metric, sd);
      CHECK(rep.sup_frame_residual < 1e-9);
    }
}

TEST_CASE("bounded potential on Kottler is V-static and tends to the expected constant") {
  const auto man = RadialManifold::make(3, 1, 1.0);
  const auto model = schwarzschild_ads(man, 1.0, true);
  const auto sd = bounded_static_potential(model.metric, 2.0);
  const auto grid = residual_grid(model.metric);
  const auto rep = vstatic_residual(model.metric, sd, grid);
  CHECK(rep.sup_frame_residual < 1e-10);
  const auto cls = classify_asymptotics(sd.f, sd.lambda, 3, grid);
  CHECK(cls.branch == Branch::AsymptoticallyConstant);
  CHECK(cls.limit_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cls.limit_matches_lambda);
}

TEST_CASE("classifier separates the two branches") {
  const auto g = reference_metric(RadialManifold::make(3, 1, 1.0));
  const auto grid = residual_grid(g);
  const auto lin = classify_asymptotics(profiles::kottler_potential(3, 1, 0.0), 0.0, 3, grid);
  CHECK(lin.branch == Branch::LinearGrowth);
  CHECK(lin.growth_slope == doctest::Approx(1.0).epsilon(1e-4));
  const auto flat = classify_asymptotics(profiles::constant(2.0) + profiles::power(1.0, -3.0), 4.0, 3, grid);
  CHECK(flat.branch == Branch::AsymptoticallyConstant);
  CHECK(flat.limit_value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(flat.fitted_rate == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(flat.limit_matches_lambda);
}

TEST_CASE("trace equation with a Dirichlet boundary value") {
  const auto man = RadialManifold::make(3, 1, 1.0);
  const auto model = schwarzschild_ads(man, 1.0, true);
  const auto sol = solve_trace_equation(model.metric, 2.0, 1.0);
  const double r0 = model.metric.domain_start();
  CHECK(sol.f.value(r0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(sol.attained_asymptote == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.ode_residual < 1e-7);
  for (double r : {1.2 * r0, 3.0, 20.0}) {
    const double res = laplacian(model.metric, sol.f, r) - 3.0 * (sol.f.value(r) - 1.0);
    CHECK(std::abs(res) < 1e-7);
  }
}

TEST_CASE("radial V-static integration reproduces Kottler from its own initial data") {
  const int n = 3, k = 1;
  const double m = 0.5, r0 = 1.5;
  const double psi = kottler_psi(n, k, m, r0);
  const double dpsi = 2 * r0 + 2 * (n - 2) * m * std::pow(r0, 1.0 - n);
  const RadialInitialData data{r0 * r0, 2 * r0 * std::sqrt(psi), std::sqrt(psi), 0.5 * dpsi};
  const auto sol = solve_radial_vstatic(RadialManifold::make(n, k, 1.0), data, 0.0, 200.0);
  REQUIRE_FALSE(sol.blew_up);
  CHECK(sol.tangential_residual < 1e-8);
  for (double r : {2.0, 10.0, 150.0}) {
    CHECK(sol.data.f.value(r) == doctest::Approx(std::sqrt(kottler_psi(n, k, m, r))).epsilon(1e-8));
    CHECK(sol.metric.q.value(r) == doctest::Approx(1.0 / kottler_psi(n, k, m, r)).epsilon(1e-8));
  }
}

TEST_CASE("Yamabe projection: reference fixed, CSC output, exact hyperbolic in rotational symmetry") {
  const auto man = RadialManifold::make(3, 1, 1.0);
  const auto ref = yamabe_project(reference_metric(man));
  CHECK(std::abs(ref.factor.value(2.0) - 1.0) < 1e-12);

  auto g = reference_metric(man);
  g.q = g.q + profiles::bump(2.0, 1.0, 0.01);
  const auto proj = yamabe_project(g);
  CHECK(proj.matching_residual < 1e-10);
  for (double r : {1.5, 2.2, 40.0})
    CHECK(curvature_fields(proj.metric, r).scal == doctest::Approx(-6.0).epsilon(1e-8));
  // A smooth rotationally symmetric metric with scal = -6 is hyperbolic space.
  CHECK(std::abs(mass_vr(proj.metric).mass) < 1e-8);
  const auto again = yamabe_project(proj.metric);
  CHECK(std::abs(again.factor.value(2.0) - 1.0) < 1e-9);
}
