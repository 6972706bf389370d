#include <doctest.h>

#include <cmath>

#include "vrmass/geometry.hpp"
#include "vrmass/linearised.hpp"
#include "vrmass/vstatic.hpp"

using namespace vrmass;

namespace {

RadialMetric bumped(int n, int k) {
  auto g = reference_metric(RadialManifold::make(n, k, 1.0));
  g.q = g.q + profiles::bump(2.5, 1.0, 0.04);
  g.w = g.w + profiles::bump(2.8, 1.1, 0.25);
  return g;
}

SymmetricPerturbation test_direction() {
  return {profiles::bump(2.4, 0.9, 0.3) + profiles::power(0.01, -3.0),
          profiles::bump(2.9, 0.7, 0.6) + profiles::power(0.05, -1.0)};
}

// Observed order of a central difference of `value(eps)` against `exact`.
template <class F>
double observed_order(F value, double exact, double eps) {
  const double e1 = std::abs((value(eps) - value(-eps)) / (2 * eps) - exact);
  const double e2 = std::abs((value(eps / 2) - value(-eps / 2)) / eps - exact);
  return std::log2(e1 / e2);
}

}  // namespace

TEST_CASE("linearised scalar curvature and mean curvature are second-order consistent") {
  for (auto [n, k] : {std::pair{3, 1}, std::pair{4, -1}, std::pair{5, 0}}) {
    CAPTURE(n);
    const auto g = bumped(n, k);
    const auto h = test_direction();
    for (double r : {2.2, 3.1}) {
      auto scal = [&](double e) { return curvature_fields(perturbed(g, h, e), r).scal; };
      auto mean = [&](double e) { return mean_curvature_data(perturbed(g, h, e), r).H; };
      CHECK(observed_order(scal, linearised_scalar(g, h, r), 0.02) >= 1.9);
      CHECK(observed_order(mean, linearised_mean_curvature(g, h, r), 0.02) >= 1.9);
      CHECK(linearised_mean_curvature_boundary_form(g, h, r) ==
            doctest::Approx(linearised_mean_curvature(g, h, r)).epsilon(1e-11));
    }
  }
}

TEST_CASE("Laplacian is the divergence of the gradient") {
  const auto g = bumped(4, 1);
  const auto f = profiles::power(1.0, 1.5) + profiles::bump(2.5, 1.0, 0.2);
  const double r = 2.7, step = 1e-4;
  // div(∇f) = (1/√det) ∂_r(√det · f'/q), √det = √q w^{m/2}
  auto flux = [&](double s) {
    const auto d = f(s);
    return std::sqrt(g.q.value(s)) * std::pow(g.w.value(s), 1.5) * d.d1 / g.q.value(s);
  };
  const double expected = (flux(r + step) - flux(r - step)) / (2 * step) /
                          (std::sqrt(g.q.value(r)) * std::pow(g.w.value(r), 1.5));
  CHECK(laplacian(g, f, r) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("adjoint identity holds on bounded annuli") {
  for (auto [n, k] : {std::pair{3, 1}, std::pair{4, 0}, std::pair{3, -1}}) {
    CAPTURE(n);
    const auto g = bumped(n, k);
    const auto f = profiles::power(1.0, 1.0) + profiles::bump(3.0, 1.2, 0.5);
    CHECK(adjoint_identity_defect(g, f, test_direction(), 1.4, 6.0) < 1e-8);
  }
}

TEST_CASE("the static potential annihilates the adjoint on Kottler") {
  const auto man = RadialManifold::make(3, 1, 1.0);
  const auto model = schwarzschild_ads(man, 0.5, true);
  const auto f = profiles::kottler_potential(3, 1, 0.5);
  for (double r : {1.5, 4.0, 30.0}) {
    const auto t = adjoint_linearised_scalar(model.metric, f, r);
    CHECK(frame_norm(model.metric, t, r) < 1e-10 * r);
  }
}

TEST_CASE("contraction and trace in the tangent frame") {
  const auto g = bumped(3, 1);
  const double r = 2.0, q = g.q.value(r), w = g.w.value(r);
  const RadialTensor s{2.0, 3.0}, t{5.0, 7.0};
  CHECK(contract(g, s, t, r) == doctest::Approx(10.0 / (q * q) + 2.0 * 21.0 / (w * w)));
  CHECK(trace(g, s, r) == doctest::Approx(2.0 / q + 2.0 * 3.0 / w));
  CHECK(frame_norm(g, s, r) == doctest::Approx(std::sqrt(contract(g, s, s, r))));
}
