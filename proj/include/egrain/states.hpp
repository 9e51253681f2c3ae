#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "egrain/density.hpp"
#include "egrain/domain.hpp"

namespace egrain {

struct HbarConvention {
  double hbar = 1.0;
};

namespace detail {

/// Uniformly sampled complex amplitudes with C1 piecewise-cubic Hermite
/// interpolation. Slopes come from 5-point 4th-order finite differences
/// (one-sided at the edges), so interpolation error is O(step^4) and the
/// interpolant has a continuous first derivative.
class SampledAmplitudes {
 public:
  SampledAmplitudes(std::vector<std::complex<double>> values, double min_coord,
                    double step)
      : v_(std::move(values)), min_(min_coord), step_(step) {
    if (v_.size() < 2)
      throw std::invalid_argument("SampledAmplitudes: need at least 2 samples");
    if (!(step_ > 0.0))
      throw std::invalid_argument("SampledAmplitudes: step must be positive");
    rebuild_slopes();
  }

  std::size_t size() const { return v_.size(); }
  double min_coord() const { return min_; }
  double max_coord() const { return min_ + step_ * double(v_.size() - 1); }
  double step() const { return step_; }
  const std::vector<std::complex<double>>& values() const { return v_; }

  double riemann_norm() const {
    double s = 0.0, comp = 0.0;
    for (const auto& a : v_) {
      const double y = std::norm(a) - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    return s * step_;
  }

  /// Integral of |interpolant|^2 over [a, b] (clipped to the grid). The
  /// squared piecewise cubic has degree 6, so 4-point Gauss-Legendre per
  /// knot interval is exact up to rounding.
  double mass_between(double a, double b) const {
    static constexpr double gl_x[4] = {
        0.069431844202973714, 0.330009478207571868, 0.669990521792428132,
        0.930568155797026286};
    static constexpr double gl_w[4] = {
        0.173927422568726929, 0.326072577431273071, 0.326072577431273071,
        0.173927422568726929};
    a = std::max(a, min_coord());
    b = std::min(b, max_coord());
    if (!(a < b)) return 0.0;
    const std::size_t first = std::min<std::size_t>(
        std::size_t((a - min_) / step_), v_.size() - 2);
    const std::size_t last = std::min<std::size_t>(
        std::size_t((b - min_) / step_), v_.size() - 2);
    double s = 0.0, comp = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      const double lo = std::max(a, min_ + step_ * double(j));
      const double hi = std::min(b, min_ + step_ * double(j + 1));
      if (!(lo < hi)) continue;
      double piece = 0.0;
      for (int g = 0; g < 4; ++g)
        piece += gl_w[g] * std::norm(value_at(lo + gl_x[g] * (hi - lo)));
      const double y = piece * (hi - lo) - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    return s;
  }

  /// Integral of |interpolant|^2 over the whole grid.
  double interpolant_norm() const { return mass_between(min_coord(), max_coord()); }

  void scale_by(double factor) {
    for (auto& a : v_) a *= factor;
    for (auto& m : slope_) m *= factor;
  }

  bool contains(double u) const { return u >= min_coord() && u <= max_coord(); }

  std::complex<double> value_at(double u) const {
    if (!contains(u))
      throw std::out_of_range("SampledAmplitudes: coordinate outside grid");
    std::size_t j = std::size_t((u - min_) / step_);
    if (j >= v_.size() - 1) j = v_.size() - 2;
    const double t = (u - (min_ + step_ * double(j))) / step_;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * v_[j] + (h10 * step_) * slope_[j] + h01 * v_[j + 1] +
           (h11 * step_) * slope_[j + 1];
  }

  double density_at(double u) const { return std::norm(value_at(u)); }

  /// Exact integral of the interpolant times e^{-i k u} over the full grid.
  /// Integrates each cubic piece in closed form, so arbitrarily oscillatory
  /// k costs O(n) with no adaptivity.
  std::complex<double> oscillatory_integral(double k) const {
    using cplx = std::complex<double>;
    const double h = step_;
    // moments I_m = int_0^h u^m e^{-iku} du, m = 0..3
    cplx moments[4];
    const double kh = k * h;
    if (std::fabs(kh) < 0.5) {
      for (int m = 0; m < 4; ++m) {
        cplx term = std::pow(h, m + 1) / double(m + 1);
        cplx sum = term;
        const cplx mik(0.0, -k);
        for (int t = 1; t < 40; ++t) {
          term *= mik * h * (double(m + t) / (double(t) * double(m + t + 1)));
          sum += term;
          if (std::abs(term) < 1e-20 * std::abs(sum)) break;
        }
        moments[m] = sum;
      }
    } else {
      const cplx ik(0.0, k);
      const cplx e = std::polar(1.0, -kh);
      moments[0] = (1.0 - e) / ik;
      double hm = 1.0;
      for (int m = 1; m < 4; ++m) {
        hm *= h;
        moments[m] = (double(m) * moments[m - 1] - hm * e) / ik;
      }
    }
    cplx total(0.0, 0.0);
    for (std::size_t j = 0; j + 1 < v_.size(); ++j) {
      const cplx a = v_[j];
      const cplx b = slope_[j];
      const cplx dv = v_[j + 1] - v_[j];
      const cplx c = 3.0 * dv / (h * h) - (2.0 * slope_[j] + slope_[j + 1]) / h;
      const cplx d =
          -2.0 * dv / (h * h * h) + (slope_[j] + slope_[j + 1]) / (h * h);
      const cplx piece =
          a * moments[0] + b * moments[1] + c * moments[2] + d * moments[3];
      const double xj = min_ + h * double(j);
      total += std::polar(1.0, -k * xj) * piece;
    }
    return total;
  }

 private:
  void rebuild_slopes() {
    const std::size_t n = v_.size();
    slope_.assign(n, {0.0, 0.0});
    const double h = step_;
    if (n < 5) {
      slope_[0] = (v_[1] - v_[0]) / h;
      slope_[n - 1] = (v_[n - 1] - v_[n - 2]) / h;
      for (std::size_t j = 1; j + 1 < n; ++j)
        slope_[j] = (v_[j + 1] - v_[j - 1]) / (2.0 * h);
      return;
    }
    const double w = 1.0 / (12.0 * h);
    slope_[0] =
        (-25.0 * v_[0] + 48.0 * v_[1] - 36.0 * v_[2] + 16.0 * v_[3] - 3.0 * v_[4]) * w;
    slope_[1] =
        (-3.0 * v_[0] - 10.0 * v_[1] + 18.0 * v_[2] - 6.0 * v_[3] + v_[4]) * w;
    for (std::size_t j = 2; j + 2 < n; ++j)
      slope_[j] = (v_[j - 2] - 8.0 * v_[j - 1] + 8.0 * v_[j + 1] - v_[j + 2]) * w;
    slope_[n - 2] = -(-3.0 * v_[n - 1] - 10.0 * v_[n - 2] + 18.0 * v_[n - 3] -
                      6.0 * v_[n - 4] + v_[n - 5]) *
                    w;
    slope_[n - 1] = -(-25.0 * v_[n - 1] + 48.0 * v_[n - 2] - 36.0 * v_[n - 3] +
                      16.0 * v_[n - 4] - 3.0 * v_[n - 5]) *
                    w;
  }

  std::vector<std::complex<double>> v_;
  std::vector<std::complex<double>> slope_;
  double min_;
  double step_;
};

}  // namespace detail

/// Analytic displaced Gaussian: width sigma, centroids x0 (position) and p0
/// (momentum). Normalized by construction.
class GaussianState {
 public:
  GaussianState(double sigma, double x0, double p0)
      : sigma_(sigma), x0_(x0), p0_(p0) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::domain_error("GaussianState: sigma must be positive");
  }

  double sigma() const { return sigma_; }
  double x0() const { return x0_; }
  double p0() const { return p0_; }

  double density(double x) const {
    const double u = (x - x0_) / sigma_;
    return std::exp(-u * u) / (std::sqrt(std::numbers::pi) * sigma_);
  }

 private:
  double sigma_, x0_, p0_;
};

/// Grid-sampled amplitudes, normalized at construction so that the Riemann
/// sum of |psi|^2 * dx equals 1. The pre-normalization norm is kept for
/// diagnostics.
class GridState {
 public:
  GridState(std::vector<std::complex<double>> samples, double x_min, double dx) {
    detail::SampledAmplitudes s(std::move(samples), x_min, dx);
    const double norm = s.riemann_norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw std::invalid_argument("GridState: samples have no usable norm");
    prenorm_ = norm;
    s.scale_by(1.0 / std::sqrt(norm));
    // the samples keep the Riemann normalization; densities are additionally
    // renormalized by the interpolant's own L2 mass (a 1 + O(dx^4) factor)
    // so that integrated probabilities are exact
    density_norm_ = s.interpolant_norm();
    carrier_ = std::make_shared<const detail::SampledAmplitudes>(std::move(s));
  }

  double x_min() const { return carrier_->min_coord(); }
  double x_max() const { return carrier_->max_coord(); }
  double dx() const { return carrier_->step(); }
  std::size_t size() const { return carrier_->size(); }
  double prenormalization_norm() const { return prenorm_; }
  const std::vector<std::complex<double>>& samples() const {
    return carrier_->values();
  }
  std::shared_ptr<const detail::SampledAmplitudes> carrier() const {
    return carrier_;
  }

  std::complex<double> amplitude_at(double x) const {
    return carrier_->value_at(x);
  }
  double density(double x) const {
    return carrier_->density_at(x) / density_norm_;
  }
  double density_norm() const { return density_norm_; }

 private:
  std::shared_ptr<const detail::SampledAmplitudes> carrier_;
  double prenorm_ = 0.0;
  double density_norm_ = 1.0;
};

/// A normalized 1-D pure state in the position representation.
class QuantumState {
 public:
  QuantumState(GaussianState g, HbarConvention hb) : rep_(g), hbar_(hb) {
    check_hbar();
  }
  QuantumState(GridState g, HbarConvention hb) : rep_(std::move(g)), hbar_(hb) {
    check_hbar();
  }

  double hbar() const { return hbar_.hbar; }
  const HbarConvention& hbar_convention() const { return hbar_; }

  const GaussianState* gaussian() const {
    return std::get_if<GaussianState>(&rep_);
  }
  const GridState* grid() const { return std::get_if<GridState>(&rep_); }

  /// |psi(x)|^2. Out-of-grid x on a sampled state is a range error.
  double density_at(double x) const {
    if (const auto* g = gaussian()) return g->density(x);
    return grid()->density(x);
  }

  std::complex<double> amplitude_at(double x) const {
    if (const auto* g = gaussian()) {
      const double u = (x - g->x0()) / g->sigma();
      const double mag =
          std::pow(std::numbers::pi * g->sigma() * g->sigma(), -0.25) *
          std::exp(-0.5 * u * u);
      const double phase = g->p0() * (x - 0.5 * g->x0()) / hbar();
      return std::polar(mag, phase);
    }
    return grid()->amplitude_at(x);
  }

  Density position_density() const {
    if (const auto* g = gaussian()) {
      const GaussianState gs = *g;
      return Density([gs](double x) { return gs.density(x); }, gs.x0(),
                     gs.sigma());
    }
    auto carrier = grid()->carrier();
    const double lo = carrier->min_coord();
    const double hi = carrier->max_coord();
    const double inv_norm = 1.0 / grid()->density_norm();
    Density d(
        [carrier, lo, hi, inv_norm](double x) {
          return (x >= lo && x <= hi) ? inv_norm * carrier->density_at(x) : 0.0;
        },
        0.5 * (lo + hi), 0.5 * (hi - lo), Interval{lo, hi});
    d.set_segment_mass([carrier, inv_norm](double a, double b) {
      return inv_norm * carrier->mass_between(a, b);
    });
    return d;
  }

  /// Integral of x^order |psi(x)|^2 over the domain.
  double moment(int order, const Domain& domain,
                const QuadOptions& opt = default_quad_options()) const {
    return density_moment(position_density(), order, domain, opt);
  }

  double mean_x() const { return moment(1, Domain::full_line()); }
  double variance_x() const {
    const double m1 = moment(1, Domain::full_line());
    return moment(2, Domain::full_line()) - m1 * m1;
  }

 private:
  void check_hbar() const {
    if (!(hbar_.hbar > 0.0) || !std::isfinite(hbar_.hbar))
      throw std::domain_error("QuantumState: hbar must be positive");
  }

  std::variant<GaussianState, GridState> rep_;
  HbarConvention hbar_;
};

inline QuantumState make_gaussian(double sigma, double x0, double p0,
                                  double hbar = 1.0) {
  return QuantumState(GaussianState(sigma, x0, p0), HbarConvention{hbar});
}

inline QuantumState make_grid_state(std::vector<std::complex<double>> samples,
                                    double x_min, double dx, double hbar = 1.0) {
  return QuantumState(GridState(std::move(samples), x_min, dx),
                      HbarConvention{hbar});
}

/// Text import: lines of "x re [im]" (two or three whitespace-separated
/// columns), '#' comments allowed. x must be strictly increasing and
/// uniformly spaced.
inline QuantumState load_grid_state(std::istream& in, double hbar = 1.0) {
  std::vector<double> xs;
  std::vector<std::complex<double>> amps;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x, re;
    if (!(row >> x >> re)) {
      // blank or comment-only line
      std::string rest;
      if (row.clear(), std::istringstream(line) >> rest)
        throw std::invalid_argument("load_grid_state: malformed line: " + line);
      continue;
    }
    double im = 0.0;
    if (!(row >> im)) {
      im = 0.0;
      row.clear();
    }
    std::string leftover;
    if (row >> leftover)
      throw std::invalid_argument("load_grid_state: malformed line: " + line);
    xs.push_back(x);
    amps.emplace_back(re, im);
  }
  if (xs.size() < 2)
    throw std::invalid_argument("load_grid_state: need at least 2 samples");
  // mean spacing absorbs text-format rounding of the x column
  const double dx = (xs.back() - xs.front()) / double(xs.size() - 1);
  if (!(dx > 0.0))
    throw std::invalid_argument("load_grid_state: x must be increasing");
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double step = xs[j] - xs[j - 1];
    if (!(step > 0.0) || std::fabs(step - dx) > 1e-6 * std::fabs(dx))
      throw std::invalid_argument(
          "load_grid_state: x must be monotone and uniformly spaced");
  }
  return make_grid_state(std::move(amps), xs.front(), dx, hbar);
}

inline QuantumState load_grid_state_file(const std::string& path,
                                         double hbar = 1.0) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_grid_state: cannot open " + path);
  return load_grid_state(in, hbar);
}

}  // namespace egrain
