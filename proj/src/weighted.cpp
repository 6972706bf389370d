#include "vrmass/weighted.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "vrmass/errors.hpp"

namespace vrmass {

LogGrid LogGrid::make(double r_min, double r_max, int points_per_decade) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw ValidationError("grid: need 0 < r_min < r_max");
  if (points_per_decade < 1) throw ValidationError("grid: points_per_decade must be >= 1");
  LogGrid g{r_min, r_max, points_per_decade, {}};
  const double decades = std::log10(r_max / r_min);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  g.nodes.resize(count);
  for (int i = 0; i < count; ++i)
    g.nodes[i] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1));
  g.nodes.front() = r_min;
  g.nodes.back() = r_max;
  return g;
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double weighted_sup_norm(const RadialProfile& u, double delta, const LogGrid& grid) {
  if (grid.nodes.empty()) throw ValidationError("weighted_sup_norm: empty grid");
  double best = 0.0;
  for (double r : grid.nodes) best = std::max(best, std::pow(r, delta) * std::abs(u.value(r)));
  return best;
}

DecayEstimate estimate_decay_rate(const std::function<double(double)>& u, const LogGrid& grid) {
  if (grid.nodes.size() < 2) throw ValidationError("estimate_decay_rate: grid too small");
  const std::size_t first = grid.nodes.size() / 2;
  DecayEstimate est;
  est.r_lo = grid.nodes[first];
  est.r_hi = grid.nodes.back();
  std::vector<double> xs, ys;
  for (std::size_t i = first; i < grid.nodes.size(); ++i) {
    const double v = std::abs(u(grid.nodes[i]));
    if (v > 0.0 && std::isfinite(v)) {
      xs.push_back(std::log(grid.nodes[i]));
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 2) return est;
  const double count = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / count;
  const double my = pairwise_sum(ys) / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + slope * (xs[i] - mx));
    ss += e * e;
  }
  est.fitted_rate = -slope;
  est.fit_residual = std::sqrt(ss / count);
  return est;
}

DecayEstimate estimate_decay_rate(const RadialProfile& u, const LogGrid& grid) {
  return estimate_decay_rate([&u](double r) { return u.value(r); }, grid);
}

namespace {

double gk_panel(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-12,
                                                                        &err);
}

double finite_integral(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> parts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) parts.push_back(gk_panel(f, cuts[i], cuts[i + 1]));
  return pairwise_sum(parts);
}

}  // namespace

double integrate_radial(const std::function<double(double)>& f, double a, double b, double tol,
                        std::span<const double> breakpoints) {
  if (!(b > a)) {
    if (b == a) return 0.0;
    throw ValidationError("integrate_radial: need a <= b");
  }
  if (std::isfinite(b)) return finite_integral(f, a, b, breakpoints);

  // Finite part up to the last interior feature, then octave panels.
  double start = std::max(a, 1.0);
  for (double c : breakpoints) start = std::max(start, c);
  if (start > a) start = std::max(start, 2.0 * a);
  std::vector<double> parts{finite_integral(f, a, start, breakpoints)};

  // Each octave panel of a power-law tail shrinks by a near-constant ratio;
  // the remainder is closed with the geometric series of the latest ratio
  // once that extrapolated total stops moving.
  constexpr int kMaxOctaves = 80;
  std::vector<double> octaves;
  double tail = 0.0;
  double previous_total = std::numeric_limits<double>::quiet_NaN();
  double lo = start;
  bool settled = false;
  for (int j = 0; j < kMaxOctaves && !settled; ++j) {
    const double hi = 2.0 * lo;
    octaves.push_back(gk_panel(f, lo, hi));
    lo = hi;
    const std::size_t m = octaves.size();
    if (m < 3) continue;
    const double last = octaves[m - 1];
    const double prev = octaves[m - 2];
    if (last == 0.0 && prev == 0.0) {
      tail = 0.0;
      settled = true;
      break;
    }
    const double ratio = prev != 0.0 ? last / prev : 1.0;
    const double ratio_prev = octaves[m - 3] != 0.0 ? prev / octaves[m - 3] : 1.0;
    if (m >= 12 && std::abs(ratio) >= 0.999 && std::abs(ratio_prev) >= 0.999)
      throw NonConvergentTail("integrate_radial: integrand tail decays no faster than 1/r");
    if (!(ratio > 0.0 && ratio < 1.0)) continue;
    tail = last * ratio / (1.0 - ratio);
    const double total = pairwise_sum(octaves) + tail;
    if (m >= 5 && std::abs(total - previous_total) < 1e-3 * tol * std::max(1.0, std::abs(total)) &&
        std::abs(ratio - ratio_prev) < 0.05)
      settled = true;
    previous_total = total;
  }
  if (!settled) throw NonConvergentTail("integrate_radial: tail did not settle");
  octaves.push_back(tail);
  parts.push_back(pairwise_sum(octaves));
  return pairwise_sum(parts);
}

double integrate_radial(const RadialProfile& f, double a, double b, double tol) {
  const auto& feats = f.features();
  return integrate_radial([&f](double r) { return f.value(r); }, a, b, tol, feats);
}

namespace {

// Three-point fit v = v∞ + c R^{-p}; returns {limit, p} or nullopt if degenerate.
std::optional<std::pair<double, double>> three_point_fit(const std::pair<double, double>& s1,
                                                         const std::pair<double, double>& s2,
                                                         const std::pair<double, double>& s3) {
  const double d1 = s2.second - s1.second;
  const double d2 = s3.second - s2.second;
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0)) return std::nullopt;
  const double target = d2 / d1;
  auto ratio = [&](double p) {
    const double a = std::pow(s1.first, -p), b = std::pow(s2.first, -p), c = std::pow(s3.first, -p);
    return (c - b) / (b - a) - target;
  };
  double p;
  const double rho1 = s2.first / s1.first, rho2 = s3.first / s2.first;
  if (std::abs(rho1 - rho2) < 1e-12 * rho1) {
    if (!(target > 0.0 && target < 1.0)) return std::nullopt;
    p = -std::log(target) / std::log(rho1);
  } else {
    double lo = 1e-8, hi = 60.0;
    if (ratio(lo) * ratio(hi) > 0.0) return std::nullopt;
    boost::uintmax_t iters = 200;
    auto [x0, x1] = boost::math::tools::toms748_solve(
        ratio, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    p = 0.5 * (x0 + x1);
  }
  const double a = std::pow(s2.first, -p), b = std::pow(s3.first, -p);
  const double c = d2 / (b - a);
  return std::make_pair(s3.second - c * b, p);
}

double ladder_fit(const std::vector<std::pair<double, double>>& s, std::size_t from, double p0) {
  const std::size_t m = s.size() - from;
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = s[from + i].first / s.back().first;
    a(i, 0) = 1.0;
    for (std::size_t j = 1; j < m; ++j) a(i, j) = std::pow(r, -(p0 + static_cast<double>(j - 1)));
    rhs(i) = s[from + i].second;
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs);
  return x(0);
}

}  // namespace

ExtrapolationReport extrapolate_limit(std::vector<std::pair<double, double>> samples,
                                      std::optional<double> p_hint) {
  if (samples.size() < 3) throw ValidationError("extrapolate_limit: need at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw ValidationError("extrapolate_limit: sample radii must be strictly increasing");
  ExtrapolationReport rep;
  rep.samples = samples;
  const std::size_t n = samples.size();

  bool all_equal = true;
  for (const auto& s : samples) all_equal = all_equal && s.second == samples.front().second;
  if (all_equal) {
    rep.limit = rep.free_fit_limit = samples.back().second;
    rep.correction_exponent = std::numeric_limits<double>::quiet_NaN();
    rep.degenerate = true;
    return rep;
  }

  const auto fit = three_point_fit(samples[n - 3], samples[n - 2], samples[n - 1]);
  const auto fit_prev =
      n >= 4 ? three_point_fit(samples[n - 4], samples[n - 3], samples[n - 2]) : std::nullopt;
  rep.correction_exponent = fit ? fit->second : std::numeric_limits<double>::quiet_NaN();
  rep.free_fit_limit = fit ? fit->first : samples.back().second;

  if (p_hint) {
    rep.limit = ladder_fit(samples, 0, *p_hint);
    const double coarser = n >= 4 ? ladder_fit(samples, 1, *p_hint) : rep.free_fit_limit;
    rep.error_estimate = std::abs(rep.limit - coarser);
  } else {
    if (!fit) {
      // Non-monotone or stalled increments: fall back to the last sample.
      rep.limit = samples.back().second;
      rep.error_estimate = std::abs(samples[n - 1].second - samples[n - 2].second);
      return rep;
    }
    rep.limit = fit->first;
    rep.error_estimate = fit_prev ? std::abs(fit->first - fit_prev->first)
                                  : std::abs(samples[n - 1].second - fit->first);
  }
  return rep;
}

}  // namespace vrmass
