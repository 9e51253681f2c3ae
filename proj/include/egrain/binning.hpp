#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "egrain/density.hpp"
#include "egrain/errors.hpp"
#include "egrain/states.hpp"

namespace egrain {

/// Uncovered-mass target for full-line grids. Entropy contributions of the
/// dropped bins are then below 1e-10 nats.
inline constexpr double kTruncationEps = 1e-12;
/// Probabilities below this are stored as exact zeros (no log underflow).
inline constexpr double kProbabilityFloor = 1e-300;
inline constexpr long kMaxFullLineBins = 1000000;

enum class BinConvention { border, midpoint };

/// Equal-width partition xi_k = xi0 + k*delta. Full-line grids accept any
/// offset; finite windows always use the midpoint convention (edges at
/// +-(M+1/2)*delta).
class BinGrid {
 public:
  static BinGrid full_line(double delta, double xi0) {
    return BinGrid(delta, xi0, std::nullopt);
  }
  static BinGrid full_line(double delta, BinConvention conv) {
    return BinGrid(delta, conv == BinConvention::border ? 0.0 : -0.5 * delta,
                   std::nullopt);
  }
  static BinGrid finite(double delta, int window_m) {
    if (window_m < 0)
      throw std::invalid_argument("BinGrid: window must be nonnegative");
    return BinGrid(delta, -0.5 * delta, window_m);
  }

  double delta() const { return delta_; }
  double xi0() const { return xi0_; }
  bool is_finite() const { return m_.has_value(); }
  int window_m() const { return m_.value(); }
  /// (M + 1/2) * delta, the half-width covered by a finite window.
  double window_half_width() const {
    return (double(m_.value()) + 0.5) * delta_;
  }

  double lower_edge(long k) const { return xi0_ + double(k) * delta_; }
  double upper_edge(long k) const { return xi0_ + double(k + 1) * delta_; }

 private:
  BinGrid(double delta, double xi0, std::optional<int> m)
      : delta_(delta), xi0_(xi0), m_(m) {
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw std::invalid_argument("BinGrid: delta must be positive");
    if (!std::isfinite(xi0)) throw std::invalid_argument("BinGrid: bad xi0");
  }

  double delta_;
  double xi0_;
  std::optional<int> m_;
};

/// Ordered bin probabilities q_k, k = k_min .. k_min+probs.size()-1, plus
/// covered/tail mass bookkeeping.
struct DiscreteDistribution {
  std::vector<double> probs;
  long k_min = 0;
  double delta = 0.0;
  double xi0 = 0.0;
  bool finite_window = false;
  int window_m = -1;
  double covered_mass = 0.0;
  double tail_mass = 0.0;

  long k_max() const { return k_min + long(probs.size()) - 1; }
  double prob(long k) const {
    return (k < k_min || k > k_max()) ? 0.0 : probs[std::size_t(k - k_min)];
  }
  std::size_t size() const { return probs.size(); }

  /// CSV export: columns (k, lower_edge, upper_edge, prob).
  void write_csv(std::ostream& os) const {
    char buf[96];
    os << "k,lower_edge,upper_edge,prob\n";
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const long k = k_min + long(i);
      const double lo = xi0 + double(k) * delta;
      const double hi = xi0 + double(k + 1) * delta;
      std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g\n", k, lo, hi,
                    probs[i]);
      os << buf;
    }
  }
};

/// Tolerances for per-bin integrals: tight enough that the accumulated drift
/// over ~10^3 bins stays well under kTruncationEps.
inline const QuadOptions& bin_quad_options() {
  static const QuadOptions opt{5e-13, 1e-16, 8000};
  return opt;
}

namespace detail {

inline double integrate_bin(const Density& rho, double lo, double hi,
                            const QuadOptions& opt) {
  const double v = density_moment(rho, 0, Domain::segment(lo, hi), opt);
  if (!(v > kProbabilityFloor)) return 0.0;
  return v;
}

inline double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

/// Coarse-grain a normalized density into bin probabilities. Finite windows
/// return exactly 2M+1 probabilities for k in [-M, M] with tail_mass = the
/// directly integrated mass outside +-(M+1/2)delta; full-line grids extend
/// outward from the density center until the uncovered mass drops below
/// kTruncationEps.
inline DiscreteDistribution bin_probabilities(
    const Density& rho, const BinGrid& grid,
    const QuadOptions& opt = bin_quad_options()) {
  DiscreteDistribution out;
  out.delta = grid.delta();
  out.xi0 = grid.xi0();

  if (grid.is_finite()) {
    const int m = grid.window_m();
    out.finite_window = true;
    out.window_m = m;
    out.k_min = -m;
    out.probs.reserve(std::size_t(2 * m + 1));
    for (long k = -m; k <= m; ++k)
      out.probs.push_back(
          detail::integrate_bin(rho, grid.lower_edge(k), grid.upper_edge(k), opt));
    out.covered_mass = detail::kahan_sum(out.probs);
    const double w = grid.window_half_width();
    double q = density_moment(rho, 0, Domain::outside(w), opt);
    if (q < 0.0) q = 0.0;
    out.tail_mass = q;
    return out;
  }

  const long k_center = long(std::floor((rho.center() - grid.xi0()) / grid.delta()));
  std::deque<double> probs;
  double covered = 0.0, comp = 0.0;
  auto accumulate = [&](double p) {
    const double y = p - comp;
    const double t = covered + y;
    comp = (t - covered) - y;
    covered = t;
  };
  probs.push_back(
      detail::integrate_bin(rho, grid.lower_edge(k_center), grid.upper_edge(k_center), opt));
  accumulate(probs.back());
  long left = k_center - 1, right = k_center + 1;
  bool exhausted_left = false, exhausted_right = false;
  const auto support = rho.support();
  while (1.0 - covered >= kTruncationEps) {
    if (long(probs.size()) >= kMaxFullLineBins)
      throw truncation_error(
          "bin_probabilities: bin-index cap reached before the uncovered mass "
          "fell below the truncation threshold",
          std::max(0.0, 1.0 - covered));
    bool progress = false;
    if (!exhausted_left) {
      if (support && grid.upper_edge(left) <= support->lo) {
        exhausted_left = true;
      } else {
        probs.push_front(
            detail::integrate_bin(rho, grid.lower_edge(left), grid.upper_edge(left), opt));
        accumulate(probs.front());
        --left;
        progress = true;
      }
    }
    if (!exhausted_right) {
      if (support && grid.lower_edge(right) >= support->hi) {
        exhausted_right = true;
      } else {
        probs.push_back(
            detail::integrate_bin(rho, grid.lower_edge(right), grid.upper_edge(right), opt));
        accumulate(probs.back());
        ++right;
        progress = true;
      }
    }
    if (!progress)
      throw truncation_error(
          "bin_probabilities: density support exhausted with uncovered mass "
          "above the truncation threshold (is the density normalized?)",
          std::max(0.0, 1.0 - covered));
  }
  out.k_min = left + 1;
  out.probs.assign(probs.begin(), probs.end());
  out.covered_mass = detail::kahan_sum(out.probs);
  out.tail_mass = std::max(0.0, 1.0 - out.covered_mass);
  return out;
}

inline DiscreteDistribution bin_probabilities(
    const QuantumState& state, const BinGrid& grid,
    const QuadOptions& opt = bin_quad_options()) {
  return bin_probabilities(state.position_density(), grid, opt);
}

/// Restricted second moment over the region outside the finite window,
/// <x^2>_M. Returns exactly 0 when the tail mass is below the truncation
/// threshold.
inline double tail_second_moment(const Density& rho, const BinGrid& grid,
                                 const QuadOptions& opt = default_quad_options()) {
  if (!grid.is_finite())
    throw std::invalid_argument("tail_second_moment: finite window required");
  const double w = grid.window_half_width();
  const double q = density_moment(rho, 0, Domain::outside(w), opt);
  if (q <= kTruncationEps) return 0.0;
  return density_moment(rho, 2, Domain::outside(w), opt);
}

inline double tail_second_moment(const QuantumState& state, const BinGrid& grid,
                                 const QuadOptions& opt = default_quad_options()) {
  return tail_second_moment(state.position_density(), grid, opt);
}

/// Variance of the tail-conditioned density rho/q on the region outside the
/// window. Empty tails (q <= truncation threshold) are a degenerate signal:
/// nullopt, and callers treat the associated correction as 0.
inline std::optional<double> tail_variance(
    const Density& rho, const BinGrid& grid,
    const QuadOptions& opt = default_quad_options()) {
  if (!grid.is_finite())
    throw std::invalid_argument("tail_variance: finite window required");
  const double w = grid.window_half_width();
  const Domain tail = Domain::outside(w);
  const double q = density_moment(rho, 0, tail, opt);
  if (q <= kTruncationEps) return std::nullopt;
  const double m1 = density_moment(rho, 1, tail, opt) / q;
  const double m2 = density_moment(rho, 2, tail, opt) / q;
  return m2 - m1 * m1;
}

inline std::optional<double> tail_variance(
    const QuantumState& state, const BinGrid& grid,
    const QuadOptions& opt = default_quad_options()) {
  return tail_variance(state.position_density(), grid, opt);
}

}  // namespace egrain
