#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrmass/jet.hpp"

namespace vrmass {

/// Closed interval [lo, hi] outside of which a profile vanishes identically.
struct Support {
  double lo = 0.0;
  double hi = 0.0;
};

/// A smooth radial function r -> (value, d/dr, d²/dr²).
///
/// Profiles are cheap to copy (the evaluation rule is shared) and immutable.
/// Metadata travels with the rule: an optional compact support, an optional
/// declared decay exponent, and the radii of interior features (bump edges,
/// spline knots bounding the sampled range) so that quadrature can split
/// there.
class RadialProfile {
 public:
  enum class Kind { ClosedForm, Sampled };

  using Rule = std::function<Jet(double)>;

  RadialProfile();
  RadialProfile(Rule rule, Kind kind = Kind::ClosedForm);

  Jet operator()(double r) const { return (*rule_)(r); }
  double value(double r) const { return (*rule_)(r).v; }

  Kind kind() const { return kind_; }
  const std::optional<Support>& support() const { return support_; }
  const std::optional<double>& declared_decay() const { return decay_; }
  const std::vector<double>& features() const { return features_; }

  RadialProfile& with_support(Support s);
  RadialProfile& with_decay(double rate);
  RadialProfile& with_features(std::vector<double> radii);

  /// True when the profile is known to vanish identically for r >= r0.
  bool vanishes_beyond(double r0) const { return support_ && support_->hi <= r0; }

 private:
  std::shared_ptr<const Rule> rule_;
  Kind kind_ = Kind::ClosedForm;
  std::optional<Support> support_;
  std::optional<double> decay_;
  std::vector<double> features_;
};

namespace profiles {

RadialProfile zero();
RadialProfile constant(double c);
/// c * r^p
RadialProfile power(double c, double p);
/// C^∞ bump of height `amplitude` centred at `center`, supported on
/// [center - half_width, center + half_width].
RadialProfile bump(double center, double half_width, double amplitude);
/// sqrt(r² + k - 2 m r^{2-n}), the static potential of the Kottler family.
RadialProfile kottler_potential(int n, int k, double m);

RadialProfile sum(const RadialProfile& a, const RadialProfile& b);
RadialProfile difference(const RadialProfile& a, const RadialProfile& b);
RadialProfile product(const RadialProfile& a, const RadialProfile& b);
RadialProfile scaled(const RadialProfile& a, double c);

/// Not-a-knot cubic spline through (r_i, v_i), interpolating in log r.
/// Outside [r_0, r_last] evaluation throws DomainError.
RadialProfile sampled_log_spline(std::span<const double> radii,
                                 std::span<const double> values);

/// Piecewise quintic Hermite interpolant through (r_i, v_i, v'_i, v''_i).
RadialProfile quintic_hermite(std::vector<double> radii, std::vector<Jet> data);

/// `inner` on r <= r_switch and `outer` beyond; the caller is responsible
/// for matching jets at the switch.
RadialProfile spliced(const RadialProfile& inner, const RadialProfile& outer, double r_switch);

}  // namespace profiles

inline RadialProfile operator+(const RadialProfile& a, const RadialProfile& b) {
  return profiles::sum(a, b);
}
inline RadialProfile operator-(const RadialProfile& a, const RadialProfile& b) {
  return profiles::difference(a, b);
}
inline RadialProfile operator*(const RadialProfile& a, const RadialProfile& b) {
  return profiles::product(a, b);
}
inline RadialProfile operator*(double c, const RadialProfile& a) {
  return profiles::scaled(a, c);
}

}  // namespace vrmass
