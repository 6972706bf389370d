#include "vrmass/profile.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vrmass/errors.hpp"

namespace vrmass {

RadialProfile::RadialProfile() : RadialProfile([](double) { return Jet{}; }) {
  support_ = Support{0.0, 0.0};
}

RadialProfile::RadialProfile(Rule rule, Kind kind)
    : rule_(std::make_shared<const Rule>(std::move(rule))), kind_(kind) {}

RadialProfile& RadialProfile::with_support(Support s) {
  support_ = s;
  return *this;
}

RadialProfile& RadialProfile::with_decay(double rate) {
  decay_ = rate;
  return *this;
}

RadialProfile& RadialProfile::with_features(std::vector<double> radii) {
  features_ = std::move(radii);
  return *this;
}

namespace profiles {
namespace {

std::vector<double> merged_features(const RadialProfile& a, const RadialProfile& b) {
  std::vector<double> out = a.features();
  out.insert(out.end(), b.features().begin(), b.features().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> slower_decay(const RadialProfile& a, const RadialProfile& b) {
  if (a.support()) return b.declared_decay();
  if (b.support()) return a.declared_decay();
  if (a.declared_decay() && b.declared_decay())
    return std::min(*a.declared_decay(), *b.declared_decay());
  return std::nullopt;
}

}  // namespace

RadialProfile zero() { return RadialProfile(); }

RadialProfile constant(double c) {
  RadialProfile p([c](double) { return Jet{c, 0.0, 0.0}; });
  if (c == 0.0) p.with_support({0.0, 0.0});
  return p;
}

RadialProfile power(double c, double e) {
  RadialProfile p([c, e](double r) {
    const double v = c * std::pow(r, e);
    return Jet{v, e * v / r, e * (e - 1.0) * v / (r * r)};
  });
  if (e < 0.0) p.with_decay(-e);
  return p;
}

RadialProfile bump(double center, double half_width, double amplitude) {
  const double lo = center - half_width;
  const double hi = center + half_width;
  RadialProfile p([=](double r) {
    const double x = (r - center) / half_width;
    if (std::abs(x) >= 1.0) return Jet{};
    const double s = 1.0 - x * x;
    const double g = -1.0 / s;
    const double g1 = -2.0 * x / (s * s);
    const double g2 = -(2.0 + 6.0 * x * x) / (s * s * s);
    const double phi = amplitude * std::exp(1.0 + g);
    const double inv = 1.0 / half_width;
    return Jet{phi, phi * g1 * inv, phi * (g2 + g1 * g1) * inv * inv};
  });
  p.with_support({lo, hi}).with_features({lo, center, hi});
  return p;
}

RadialProfile kottler_potential(int n, int k, double m) {
  RadialProfile p([n, k, m](double r) {
    const double psi = r * r + k - 2.0 * m * std::pow(r, 2 - n);
    const double psi1 = 2.0 * r - 2.0 * m * (2 - n) * std::pow(r, 1 - n);
    const double psi2 = 2.0 - 2.0 * m * (2 - n) * (1 - n) * std::pow(r, -n);
    const double v = std::sqrt(psi);
    return Jet{v, psi1 / (2.0 * v), psi2 / (2.0 * v) - psi1 * psi1 / (4.0 * v * v * v)};
  });
  return p;
}

RadialProfile sum(const RadialProfile& a, const RadialProfile& b) {
  RadialProfile p([a, b](double r) {
    const Jet x = a(r);
    const Jet y = b(r);
    return Jet{x.v + y.v, x.d1 + y.d1, x.d2 + y.d2};
  });
  if (a.support() && b.support()) {
    if (a.support()->hi <= a.support()->lo) {
      p.with_support(*b.support());
    } else if (b.support()->hi <= b.support()->lo) {
      p.with_support(*a.support());
    } else {
      p.with_support({std::min(a.support()->lo, b.support()->lo),
                      std::max(a.support()->hi, b.support()->hi)});
    }
  }
  if (auto d = slower_decay(a, b)) p.with_decay(*d);
  p.with_features(merged_features(a, b));
  return p;
}

RadialProfile difference(const RadialProfile& a, const RadialProfile& b) {
  return sum(a, scaled(b, -1.0));
}

RadialProfile product(const RadialProfile& a, const RadialProfile& b) {
  RadialProfile p([a, b](double r) {
    const Jet x = a(r);
    const Jet y = b(r);
    return Jet{x.v * y.v, x.d1 * y.v + x.v * y.d1,
               x.d2 * y.v + 2.0 * x.d1 * y.d1 + x.v * y.d2};
  });
  if (a.support() && b.support()) {
    p.with_support({std::max(a.support()->lo, b.support()->lo),
                    std::min(a.support()->hi, b.support()->hi)});
  } else if (a.support()) {
    p.with_support(*a.support());
  } else if (b.support()) {
    p.with_support(*b.support());
  }
  p.with_features(merged_features(a, b));
  return p;
}

RadialProfile scaled(const RadialProfile& a, double c) {
  RadialProfile p([a, c](double r) {
    const Jet x = a(r);
    return Jet{c * x.v, c * x.d1, c * x.d2};
  });
  if (a.support()) p.with_support(*a.support());
  if (c == 0.0) p.with_support({0.0, 0.0});
  if (a.declared_decay()) p.with_decay(*a.declared_decay());
  p.with_features(a.features());
  return p;
}

RadialProfile spliced(const RadialProfile& inner, const RadialProfile& outer, double r_switch) {
  RadialProfile p(
      [inner, outer, r_switch](double r) { return r <= r_switch ? inner(r) : outer(r); },
      inner.kind());
  if (outer.declared_decay()) p.with_decay(*outer.declared_decay());
  auto feats = inner.features();
  feats.erase(std::remove_if(feats.begin(), feats.end(), [r_switch](double f) { return f >= r_switch; }),
              feats.end());
  feats.push_back(r_switch);
  p.with_features(std::move(feats));
  return p;
}

RadialProfile sampled_log_spline(std::span<const double> radii,
                                 std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(radii.size());
  if (radii.size() != values.size())
    throw ValidationError("sampled_log_spline: radii and values differ in length");
  if (n < 4) throw ValidationError("sampled_log_spline: need at least 4 samples");
  std::vector<double> x(radii.size()), y(values.begin(), values.end());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ValidationError("sampled_log_spline: radii must be positive");
    x[i] = std::log(radii[i]);
    if (i > 0 && !(x[i] > x[i - 1]))
      throw ValidationError("sampled_log_spline: radii must be strictly increasing");
  }

  // Second derivatives M_i of the spline in the log variable.
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  auto h = [&](Eigen::Index i) { return x[i + 1] - x[i]; };
  triplets.emplace_back(0, 0, h(1));
  triplets.emplace_back(0, 1, -(h(0) + h(1)));
  triplets.emplace_back(0, 2, h(0));
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    triplets.emplace_back(i, i - 1, h(i - 1));
    triplets.emplace_back(i, i, 2.0 * (h(i - 1) + h(i)));
    triplets.emplace_back(i, i + 1, h(i));
    rhs(i) = 6.0 * ((y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1));
  }
  triplets.emplace_back(n - 1, n - 3, h(n - 2));
  triplets.emplace_back(n - 1, n - 2, -(h(n - 3) + h(n - 2)));
  triplets.emplace_back(n - 1, n - 1, h(n - 3));
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  if (lu.info() != Eigen::Success)
    throw ConvergenceError("sampled_log_spline: singular spline system");
  const Eigen::VectorXd msol = lu.solve(rhs);
  std::vector<double> m(msol.data(), msol.data() + n);

  const double r_lo = radii.front();
  const double r_hi = radii.back();
  RadialProfile p(
      [x, y, m, r_lo, r_hi](double r) {
        if (r < r_lo || r > r_hi)
          throw DomainError("sampled profile evaluated outside its sampled range");
        const double t = std::log(r);
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
            0, std::min<std::ptrdiff_t>(it - x.begin() - 1,
                                        static_cast<std::ptrdiff_t>(x.size()) - 2)));
        const double hh = x[i + 1] - x[i];
        const double a0 = x[i + 1] - t;
        const double b0 = t - x[i];
        const double c0 = y[i] / hh - m[i] * hh / 6.0;
        const double c1 = y[i + 1] / hh - m[i + 1] * hh / 6.0;
        const double s = m[i] * a0 * a0 * a0 / (6.0 * hh) + m[i + 1] * b0 * b0 * b0 / (6.0 * hh) +
                         c0 * a0 + c1 * b0;
        const double s1 =
            -m[i] * a0 * a0 / (2.0 * hh) + m[i + 1] * b0 * b0 / (2.0 * hh) - c0 + c1;
        const double s2 = m[i] * a0 / hh + m[i + 1] * b0 / hh;
        return Jet{s, s1 / r, (s2 - s1) / (r * r)};
      },
      RadialProfile::Kind::Sampled);
  p.with_features({r_lo, r_hi});
  return p;
}

RadialProfile quintic_hermite(std::vector<double> radii, std::vector<Jet> data) {
  if (radii.size() != data.size() || radii.size() < 2)
    throw ValidationError("quintic_hermite: need matching node and data arrays");
  const double r_lo = radii.front();
  const double r_hi = radii.back();
  RadialProfile p(
      [radii = std::move(radii), data = std::move(data), r_lo, r_hi](double r) {
        if (r < r_lo || r > r_hi)
          throw DomainError("Hermite profile evaluated outside its node range");
        auto it = std::upper_bound(radii.begin(), radii.end(), r);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
            0, std::min<std::ptrdiff_t>(it - radii.begin() - 1,
                                        static_cast<std::ptrdiff_t>(radii.size()) - 2)));
        const double h = radii[i + 1] - radii[i];
        const Jet& a = data[i];
        const Jet& b = data[i + 1];
        const double c0 = a.v;
        const double c1 = h * a.d1;
        const double c2 = 0.5 * h * h * a.d2;
        const double big_a = b.v - c0 - c1 - c2;
        const double big_b = h * b.d1 - c1 - 2.0 * c2;
        const double big_c = h * h * b.d2 - 2.0 * c2;
        const double c3 = 10.0 * big_a - 4.0 * big_b + 0.5 * big_c;
        const double c4 = -15.0 * big_a + 7.0 * big_b - big_c;
        const double c5 = 6.0 * big_a - 3.0 * big_b + 0.5 * big_c;
        const double t = (r - radii[i]) / h;
        const double v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        const double d1 = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        const double d2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        return Jet{v, d1 / h, d2 / (h * h)};
      },
      RadialProfile::Kind::Sampled);
  p.with_features({r_lo, r_hi});
  return p;
}

}  // namespace profiles
}  // namespace vrmass
