#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <vector>

#include "egrain/domain.hpp"
#include "egrain/errors.hpp"

namespace egrain {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_intervals = 4000;
};

/// Library-wide default tolerances. EGRAIN_QUAD_RELTOL / EGRAIN_QUAD_ABSTOL
/// override them for diagnostic runs.
inline const QuadOptions& default_quad_options() {
  static const QuadOptions opts = [] {
    QuadOptions o;
    if (const char* s = std::getenv("EGRAIN_QUAD_RELTOL")) o.rel_tol = std::atof(s);
    if (const char* s = std::getenv("EGRAIN_QUAD_ABSTOL")) o.abs_tol = std::atof(s);
    return o;
  }();
  return opts;
}

/// Hints passed alongside an integrand: where to split the line and which
/// length scale to use when mapping semi-infinite pieces.
struct QuadHints {
  double center = 0.0;
  double scale = 1.0;
  std::vector<double> split_points;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1]. Nonzero |nodes| in
// descending order; index 7 is the center. Gauss points sit at odd indices.
inline constexpr double kGK15Nodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kGK15WeightsG[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct SegmentEstimate {
  double value;
  double error;
};

template <class F>
SegmentEstimate gk15(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double fc = f(mid);
  double resk = kGK15WeightsK[7] * fc;
  double resg = kGK15WeightsG[3] * fc;
  double resabs = kGK15WeightsK[7] * std::fabs(fc);
  double fv[7][2];
  for (int i = 0; i < 7; ++i) {
    const double off = half * kGK15Nodes[i];
    fv[i][0] = f(mid - off);
    fv[i][1] = f(mid + off);
    const double sum = fv[i][0] + fv[i][1];
    resk += kGK15WeightsK[i] * sum;
    resabs += kGK15WeightsK[i] * (std::fabs(fv[i][0]) + std::fabs(fv[i][1]));
    if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kGK15WeightsK[7] * std::fabs(fc - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kGK15WeightsK[i] *
              (std::fabs(fv[i][0] - mean) + std::fabs(fv[i][1] - mean));
  resasc *= std::fabs(half);
  resabs *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(err, eps50 * resabs);
  return {resk * half, err};
}

struct WorkSegment {
  double a, b, value, error;
};

struct WorstErrorFirst {
  bool operator()(const WorkSegment& x, const WorkSegment& y) const {
    return x.error < y.error;
  }
};

// Globally adaptive refinement of one finite segment. Returns value and the
// remaining error estimate; throws numeric_error if the interval budget runs
// out while the target is still far away.
template <class F>
SegmentEstimate adaptive_finite(const F& f, double a, double b,
                                const QuadOptions& opt, int initial_split) {
  std::priority_queue<WorkSegment, std::vector<WorkSegment>, WorstErrorFirst>
      heap;
  double total_value = 0.0;
  double total_error = 0.0;
  int created = 0;
  auto push = [&](double lo, double hi) {
    const SegmentEstimate e = gk15(f, lo, hi);
    heap.push({lo, hi, e.value, e.error});
    total_value += e.value;
    total_error += e.error;
    ++created;
  };
  initial_split = std::max(1, initial_split);
  for (int i = 0; i < initial_split; ++i) {
    const double lo = a + (b - a) * double(i) / initial_split;
    const double hi =
        (i + 1 == initial_split) ? b : a + (b - a) * double(i + 1) / initial_split;
    push(lo, hi);
  }
  const auto target = [&] {
    return std::max(opt.abs_tol, opt.rel_tol * std::fabs(total_value));
  };
  bool stuck = false;
  while (total_error > target()) {
    if (created >= opt.max_intervals)
      throw numeric_error("quadrature: interval budget exhausted", total_error);
    const WorkSegment worst = heap.top();
    const double width_floor =
        1e-14 * (std::fabs(worst.a) + std::fabs(worst.b) + 1.0);
    if (!(worst.b - worst.a > width_floor)) {
      stuck = true;  // cannot subdivide further
      break;
    }
    heap.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    push(worst.a, mid);
    push(mid, worst.b);
  }
  if (stuck && total_error > 1e3 * target())
    throw numeric_error("quadrature: stalled above tolerance", total_error);

  // Deterministic final reduction: segments sorted by position, Kahan sum.
  std::vector<WorkSegment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(),
            [](const WorkSegment& x, const WorkSegment& y) { return x.a < y.a; });
  double sum = 0.0, comp = 0.0, err = 0.0;
  for (const auto& s : segs) {
    const double y = s.value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err += s.error;
  }
  return {sum, err};
}

}  // namespace detail

/// Integral of f over one finite segment [a, b].
template <class F>
double integrate_segment(const F& f, double a, double b,
                         const QuadOptions& opt = default_quad_options(),
                         int initial_split = 4) {
  if (!(a < b)) return 0.0;
  return detail::adaptive_finite(f, a, b, opt, initial_split).value;
}

/// Integral of f over a union of intervals. Semi-infinite pieces are mapped to
/// [0, 1] by x = a + s*t/(1-t) (s = hints.scale); doubly infinite pieces are
/// split at hints.center first. Finite pieces are split at any hint points
/// they contain so the adaptive engine starts aligned with density features.
template <class F>
double integrate(const F& f, const Domain& domain,
                 const QuadHints& hints = {},
                 const QuadOptions& opt = default_quad_options()) {
  const double s = (hints.scale > 0.0 && std::isfinite(hints.scale))
                       ? hints.scale
                       : 1.0;
  double sum = 0.0, comp = 0.0;
  auto accumulate = [&](double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };

  auto upper_ray = [&](double a) {  // [a, inf)
    auto g = [&f, a, s](double t) {
      const double u = 1.0 - t;
      if (u <= 1e-300) return 0.0;
      const double x = a + s * t / u;
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx * s / (u * u);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opt, 8).value;
  };
  auto lower_ray = [&](double b) {  // (-inf, b]
    auto g = [&f, b, s](double t) {
      const double u = 1.0 - t;
      if (u <= 1e-300) return 0.0;
      const double x = b - s * t / u;
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx * s / (u * u);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opt, 8).value;
  };

  for (const Interval& iv : domain.parts()) {
    const bool lo_inf = std::isinf(iv.lo);
    const bool hi_inf = std::isinf(iv.hi);
    if (lo_inf && hi_inf) {
      accumulate(lower_ray(hints.center));
      accumulate(upper_ray(hints.center));
    } else if (hi_inf) {
      accumulate(upper_ray(iv.lo));
    } else if (lo_inf) {
      accumulate(lower_ray(iv.hi));
    } else {
      // split at interior hint points (center + declared split points)
      std::vector<double> cuts;
      auto consider = [&](double x) {
        if (x > iv.lo && x < iv.hi) cuts.push_back(x);
      };
      consider(hints.center);
      for (double x : hints.split_points) consider(x);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      double lo = iv.lo;
      for (double c : cuts) {
        accumulate(integrate_segment(f, lo, c, opt));
        lo = c;
      }
      accumulate(integrate_segment(f, lo, iv.hi, opt));
    }
  }
  return sum;
}

}  // namespace egrain
