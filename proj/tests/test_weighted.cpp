#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vrmass/errors.hpp"
#include "vrmass/weighted.hpp"

using namespace vrmass;

TEST_CASE("log grid includes both ends and is geometric") {
  const auto grid = LogGrid::make(2.0, 2000.0, 10);
  REQUIRE(grid.nodes.size() == 31);
  CHECK(grid.nodes.front() == 2.0);
  CHECK(grid.nodes.back() == 2000.0);
  for (std::size_t i = 1; i + 1 < grid.nodes.size(); ++i)
    CHECK(grid.nodes[i + 1] / grid.nodes[i] == doctest::Approx(grid.nodes[i] / grid.nodes[i - 1]));
}

TEST_CASE("pairwise sum is exact on integers and order independent of input size") {
  std::vector<double> xs;
  for (int i = 1; i <= 1000; ++i) xs.push_back(i);
  CHECK(pairwise_sum(xs) == 500500.0);
  std::vector<double> tiny(1 << 16, 0.1);
  CHECK(pairwise_sum(tiny) == doctest::Approx(6553.6).epsilon(1e-14));
}

TEST_CASE("semi-infinite quadrature against closed forms") {
  CHECK(integrate_radial([](double r) { return std::pow(r, -3.0); }, 1.0, INFINITY, 1e-12) ==
        doctest::Approx(0.5).epsilon(1e-11));
  CHECK(integrate_radial([](double r) { return r * r * std::exp(-r); }, 0.0, INFINITY, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-11));
  // ∫_2^∞ dr / (r² + 1) = π/2 - atan 2
  CHECK(integrate_radial([](double r) { return 1.0 / (r * r + 1.0); }, 2.0, INFINITY, 1e-12) ==
        doctest::Approx(std::numbers::pi / 2 - std::atan(2.0)).epsilon(1e-11));
}

TEST_CASE("breakpoints resolve kinks") {
  const double bp[] = {2.0};
  CHECK(integrate_radial([](double r) { return std::abs(r - 2.0); }, 0.0, 4.0, 1e-12, bp) ==
        doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("slowly decaying tails are rejected") {
  CHECK_THROWS_AS(integrate_radial([](double r) { return 1.0 / r; }, 1.0, INFINITY), NonConvergentTail);
}

TEST_CASE("decay rate of a power law and of compact support") {
  const auto grid = LogGrid::make(10.0, 1e4, 20);
  const auto est = estimate_decay_rate([](double r) { return 3.0 * std::pow(r, -2.5); }, grid);
  REQUIRE(est.fitted_rate);
  CHECK(*est.fitted_rate == doctest::Approx(2.5).epsilon(1e-10));
  const auto none = estimate_decay_rate([](double r) { return r < 5.0 ? 1.0 : 0.0; }, grid);
  CHECK(none.compact_support());
}

TEST_CASE("weighted sup norm") {
  const auto grid = LogGrid::make(1.0, 100.0, 20);
  CHECK(weighted_sup_norm(profiles::power(1.0, -2.0), 1.0, grid) == doctest::Approx(1.0));
  CHECK(weighted_sup_norm(profiles::power(1.0, -2.0), 3.0, grid) == doctest::Approx(100.0));
}

TEST_CASE("Richardson ladder recovers the limit of an expansion in 1/R") {
  std::vector<std::pair<double, double>> s;
  for (int j = 0; j < 7; ++j) {
    const double R = 16.0 * std::pow(2.0, j);
    s.push_back({R, 2.0 + 3.0 / R + 1.0 / (R * R) - 5.0 / (R * R * R)});
  }
  const auto rep = extrapolate_limit(s, 1.0);
  CHECK(rep.limit == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.error_estimate < 1e-8);
}

TEST_CASE("free fit recovers a non-integer correction exponent") {
  std::vector<std::pair<double, double>> s;
  for (int j = 0; j < 5; ++j) {
    const double R = 10.0 * std::pow(2.0, j);
    s.push_back({R, 1.0 + std::pow(R, -1.7)});
  }
  const auto rep = extrapolate_limit(s);
  CHECK(rep.limit == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.correction_exponent == doctest::Approx(1.7).epsilon(1e-8));
}

TEST_CASE("constant samples are degenerate") {
  const auto rep = extrapolate_limit({{1.0, 4.0}, {2.0, 4.0}, {4.0, 4.0}});
  CHECK(rep.degenerate);
  CHECK(rep.limit == 4.0);
}
