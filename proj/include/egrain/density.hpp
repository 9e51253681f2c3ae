#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "egrain/domain.hpp"
#include "egrain/quadrature.hpp"

namespace egrain {

/// A probability density on the real line, bundled with the numeric hints the
/// quadrature needs: a split center, a decay length and an optional support.
/// Densities are immutable values; copies share nothing mutable.
class Density {
 public:
  Density(std::function<double(double)> rho, double center, double scale,
          std::optional<Interval> support = std::nullopt,
          std::vector<double> split_points = {})
      : rho_(std::move(rho)),
        center_(center),
        scale_(scale),
        support_(support),
        split_points_(std::move(split_points)) {}

  double operator()(double x) const { return rho_(x); }
  double center() const { return center_; }
  double scale() const { return scale_; }
  const std::optional<Interval>& support() const { return support_; }
  const std::vector<double>& split_points() const { return split_points_; }

  Domain clip(const Domain& domain) const {
    return support_ ? domain.clipped(*support_) : domain;
  }
  QuadHints hints() const { return {center_, scale_, split_points_}; }

  /// Densities backed by piecewise polynomials can integrate their own mass
  /// over a finite segment exactly; quadrature is the fallback.
  const std::function<double(double, double)>& segment_mass() const {
    return segment_mass_;
  }
  Density& set_segment_mass(std::function<double(double, double)> fn) {
    segment_mass_ = std::move(fn);
    return *this;
  }

 private:
  std::function<double(double)> rho_;
  double center_;
  double scale_;
  std::optional<Interval> support_;
  std::vector<double> split_points_;
  std::function<double(double, double)> segment_mass_;
};

inline Density uniform_density(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("uniform_density: need a < b");
  const double h = 1.0 / (b - a);
  return Density([a, b, h](double x) { return (x >= a && x <= b) ? h : 0.0; },
                 0.5 * (a + b), b - a, Interval{a, b});
}

/// rho scaled by 1/mass (e.g. a tail restriction renormalized to unit mass).
inline Density renormalized(const Density& rho, double mass) {
  if (!(mass > 0.0))
    throw std::invalid_argument("renormalized: mass must be positive");
  return Density([rho, mass](double x) { return rho(x) / mass; }, rho.center(),
                 rho.scale(), rho.support(), rho.split_points());
}

/// Integral of x^order * rho(x) over the domain, order in {0, 1, 2}.
inline double density_moment(const Density& rho, int order, const Domain& domain,
                             const QuadOptions& opt = default_quad_options()) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("density_moment: order must be 0, 1 or 2");
  const Domain clipped = rho.clip(domain);
  if (order == 0 && rho.segment_mass()) {
    bool all_finite = true;
    for (const auto& iv : clipped.parts())
      if (!iv.finite()) all_finite = false;
    if (all_finite) {
      double s = 0.0;
      for (const auto& iv : clipped.parts()) s += rho.segment_mass()(iv.lo, iv.hi);
      return s;
    }
  }
  auto f = [&rho, order](double x) {
    const double r = rho(x);
    if (r <= 0.0) return 0.0;  // also keeps inf * 0 out of the tails
    double v = r;
    for (int i = 0; i < order; ++i) v *= x;
    return v;
  };
  return integrate(f, clipped, rho.hints(), opt);
}

}  // namespace egrain
