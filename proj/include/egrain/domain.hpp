#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace egrain {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo;
  double hi;

  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const { return hi - lo; }
};

/// A finite union of disjoint intervals on the real line, kept sorted by
/// lower endpoint.
class Domain {
 public:
  Domain() = default;

  explicit Domain(std::vector<Interval> parts) : parts_(std::move(parts)) {
    for (const auto& iv : parts_) {
      if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo <= iv.hi))
        throw std::invalid_argument("Domain: malformed interval");
    }
    std::sort(parts_.begin(), parts_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < parts_.size(); ++i)
      if (parts_[i].lo < parts_[i - 1].hi)
        throw std::invalid_argument("Domain: intervals overlap");
  }

  static Domain full_line() { return Domain({{-kInfinity, kInfinity}}); }
  static Domain segment(double a, double b) { return Domain({{a, b}}); }
  static Domain ray_below(double b) { return Domain({{-kInfinity, b}}); }
  static Domain ray_above(double a) { return Domain({{a, kInfinity}}); }
  /// (-inf, -w] U [w, inf): the region outside a centered window.
  static Domain outside(double w) {
    return Domain({{-kInfinity, -w}, {w, kInfinity}});
  }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  /// Intersection with a single interval. Zero-length leftovers are dropped;
  /// they carry no mass.
  Domain clipped(const Interval& clip) const {
    Domain out;
    for (const auto& iv : parts_) {
      const double lo = std::max(iv.lo, clip.lo);
      const double hi = std::min(iv.hi, clip.hi);
      if (lo < hi) out.parts_.push_back({lo, hi});
    }
    return out;
  }

 private:
  std::vector<Interval> parts_;
};

}  // namespace egrain
