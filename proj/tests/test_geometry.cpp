#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>

#include "vrmass/errors.hpp"
#include "vrmass/geometry.hpp"
#include "vrmass/vstatic.hpp"

using namespace vrmass;

namespace {

// Brute-force Riemannian geometry in explicit coordinates (r, θ1, ..., θm):
// Christoffel symbols and Ricci by nested central differences of the metric
// components. Shares nothing with the warped-product reduction under test.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MetricFn = std::function<Mat(const Vec&)>;

// Cross-section metric of constant curvature k in polar-type coordinates.
double cross_factor(int k, const Vec& x, int i) {
  double f = 1.0;
  for (int j = 1; j < i; ++j) {
    const double t = x(j);
    if (j == 1 && k == -1)
      f *= std::sinh(t) * std::sinh(t);
    else if (k == 0)
      f *= 1.0;
    else
      f *= std::sin(t) * std::sin(t);
  }
  return f;
}

MetricFn explicit_metric(const RadialMetric& g) {
  const int n = g.n();
  const int k = g.manifold.k;
  return [g, n, k](const Vec& x) {
    Mat m = Mat::Zero(n, n);
    m(0, 0) = g.q.value(x(0));
    const double w = g.w.value(x(0));
    for (int i = 1; i < n; ++i) m(i, i) = w * cross_factor(k, x, i);
    return m;
  };
}

std::vector<Mat> christoffel(const MetricFn& metric, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  std::vector<Mat> dg(n);
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp(l) += h;
    xm(l) -= h;
    dg[l] = (metric(xp) - metric(xm)) / (2.0 * h);
  }
  const Mat inv = metric(x).inverse();
  std::vector<Mat> gamma(n, Mat::Zero(n, n));  // gamma[k](i, j) = Γ^k_ij
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
      }
  return gamma;
}

Mat ricci(const MetricFn& metric, const Vec& x) {
  const int n = static_cast<int>(x.size());
  const double h_outer = 1e-4, h_inner = 1e-5;
  const auto gamma = christoffel(metric, x, h_inner);
  std::vector<std::vector<Mat>> dgamma(n);  // dgamma[l][k] = ∂_l Γ^k
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp(l) += h_outer;
    xm(l) -= h_outer;
    const auto gp = christoffel(metric, xp, h_inner);
    const auto gm = christoffel(metric, xm, h_inner);
    for (int k = 0; k < n; ++k) dgamma[l].push_back((gp[k] - gm[k]) / (2.0 * h_outer));
  }
  Mat ric = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += dgamma[k][k](i, j) - dgamma[j][k](i, k);
        for (int l = 0; l < n; ++l)
          s += gamma[k](k, l) * gamma[l](i, j) - gamma[k](j, l) * gamma[l](i, k);
      }
      ric(i, j) = s;
    }
  return ric;
}

RadialMetric bumped(int n, int k) {
  auto g = reference_metric(RadialManifold::make(n, k, 1.0));
  g.q = g.q + profiles::bump(2.5, 1.0, 0.05);
  g.w = g.w + profiles::bump(2.7, 1.2, 0.3);
  return g;
}

}  // namespace

TEST_CASE("reference metrics have scal = -n(n-1) and vanishing Einstein deficit") {
  for (int n : {3, 4, 5})
    for (int k : {-1, 0, 1}) {
      const auto g = reference_metric(RadialManifold::make(n, k, 1.0));
      for (double r : {1.3, 2.0, 7.5, 40.0, 900.0}) {
        const auto c = curvature_fields(g, r);
        CHECK(c.scal == doctest::Approx(-n * (n - 1.0)).epsilon(1e-12));
        CHECK(c.einstein_deficit < 1e-10);
        CHECK(scalar_excess(g, r) == 0.0);
      }
    }
}

TEST_CASE("warped-product curvature matches brute-force coordinate Ricci") {
  for (auto [n, k] : {std::pair{3, 1}, std::pair{3, -1}, std::pair{3, 0}, std::pair{4, 1}}) {
    CAPTURE(n);
    CAPTURE(k);
    const auto g = bumped(n, k);
    Vec x(n);
    x(0) = 2.6;
    for (int i = 1; i < n; ++i) x(i) = 1.1 - 0.3 * i;
    const Mat ric = ricci(explicit_metric(g), x);
    const Mat gm = explicit_metric(g)(x);
    const double scal_fd = (gm.inverse() * ric).trace();
    const auto c = curvature_fields(g, x(0));
    CHECK(c.ric_rr == doctest::Approx(ric(0, 0)).epsilon(1e-5));
    CHECK(c.ric_tan * cross_factor(k, x, 1) == doctest::Approx(ric(1, 1)).epsilon(1e-5));
    CHECK(c.scal == doctest::Approx(scal_fd).epsilon(1e-5));
    CHECK(std::abs(ric(0, 1)) < 1e-5);
  }
}

TEST_CASE("mean curvature is the divergence of the unit radial normal") {
  const auto g = bumped(3, 1);
  const double r = 2.3, h = 1e-5;
  // H = (1/√det) ∂_r(√det · ν^r), ν^r = q^{-1/2}; the angular factor cancels.
  auto flux = [&](double s) { return std::sqrt(g.q.value(s)) * g.w.value(s) / std::sqrt(g.q.value(s)); };
  const double sqrt_det = std::sqrt(g.q.value(r)) * g.w.value(r);
  const double fd = (flux(r + h) - flux(r - h)) / (2.0 * h) / sqrt_det;
  CHECK(mean_curvature_data(g, r).H == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("Kottler metrics are CSC with scal = -n(n-1)") {
  for (int n : {3, 4, 5}) {
    const auto man = RadialManifold::make(n, 1, 1.0);
    const auto model = schwarzschild_ads(man, 0.7, true);
    REQUIRE(model.horizon);
    for (double r : {1.05 * *model.horizon, 2.0, 10.0, 300.0})
      CHECK(curvature_fields(model.metric, r).scal == doctest::Approx(-n * (n - 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("volume density and frame deviation") {
  const auto man = RadialManifold::make(3, 1, 4.0 * std::numbers::pi);
  const auto g = bumped(3, 1);
  const double r = 2.9;
  const double expected = 4.0 * std::numbers::pi * std::sqrt(g.q.value(r)) * g.w.value(r);
  CHECK(volume_density(g, r) / g.manifold.cross_section_volume ==
        doctest::Approx(expected / (4.0 * std::numbers::pi)).epsilon(1e-14));
  const auto ref = reference_metric(man);
  CHECK(frame_deviation(ref, 5.0) == 0.0);
  const double dq = 0.05 * std::exp(1.0 - 1.0 / (1.0 - 0.16)) * (r * r + 1.0);
  const double dw = 0.3 * std::exp(1.0 - 1.0 / (1.0 - 1.0 / 36.0)) / (r * r);
  CHECK(frame_deviation(g, r) == doctest::Approx(std::sqrt(dq * dq + 2.0 * dw * dw)).epsilon(1e-12));
}

TEST_CASE("manifold validation names the field") {
  CHECK_THROWS_WITH_AS(RadialManifold::make(2, 1, 1.0), doctest::Contains("manifold.n"), ValidationError);
  CHECK_THROWS_WITH_AS(RadialManifold::make(3, 2, 1.0), doctest::Contains("manifold.k"), ValidationError);
  CHECK_THROWS_AS(RadialManifold::make(3, -1, 1.0, 0.5), ValidationError);
  const auto g = reference_metric(RadialManifold::make(3, -1, 1.0));
  CHECK_THROWS_AS(g.check_domain(0.5), DomainError);
}
