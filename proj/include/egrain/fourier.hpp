#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <variant>
#include <vector>

#include "egrain/density.hpp"
#include "egrain/errors.hpp"
#include "egrain/states.hpp"

namespace egrain {

struct FourierOptions {
  bool enforce_contract = true;
  double edge_density_tol = 1e-14;
  std::size_t min_fft_size = 32;  // below this, evaluate nodes directly
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    // per-index twiddles from std::polar keep phase errors at one ulp
    std::vector<std::complex<double>> tw(len / 2);
    for (std::size_t k = 0; k < len / 2; ++k)
      tw[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k) / double(len));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * tw[k];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

/// DFT of arbitrary length: radix-2 directly, Bluestein otherwise.
/// Forward convention: X_m = sum_j a_j e^{-2 pi i m j / n}.
inline std::vector<std::complex<double>> dft(
    const std::vector<std::complex<double>>& in, bool inverse = false) {
  const std::size_t n = in.size();
  if (n == 0) return {};
  if (is_power_of_two(n)) {
    auto a = in;
    fft_radix2(a, inverse);
    return a;
  }
  // Bluestein: X_m = c*_m sum_j (a_j c*_j) c_{m-j}, c_k = e^{i pi k^2 / n}.
  // j^2 mod 2n keeps the chirp angles exactly reduced.
  const double sign = inverse ? -1.0 : 1.0;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const unsigned long long r = (static_cast<unsigned long long>(k) * k) % (2 * n);
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * double(r) / double(n));
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> x(m), y(m);
  for (std::size_t j = 0; j < n; ++j) x[j] = in[j] * std::conj(chirp[j]);
  y[0] = chirp[0];
  for (std::size_t j = 1; j < n; ++j) y[j] = y[m - j] = chirp[j];
  fft_radix2(x, false);
  fft_radix2(y, false);
  for (std::size_t j = 0; j < m; ++j) x[j] *= y[j];
  fft_radix2(x, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::conj(chirp[k]) * x[k];
  if (inverse)
    for (auto& v : out) v /= double(n);
  return out;
}

}  // namespace detail

/// Analytic momentum-space Gaussian: |psi~(p)|^2 = exp(-((p-p0)/width)^2) /
/// (sqrt(pi) width), width = hbar / sigma. x0 is kept for the phase.
struct GaussianMomentum {
  double width;
  double p0;
  double x0;
};

/// Momentum representation of a QuantumState, same carriers indexed by p.
class MomentumState {
 public:
  MomentumState(GaussianMomentum g, HbarConvention hb) : rep_(g), hbar_(hb) {}
  MomentumState(std::shared_ptr<const detail::SampledAmplitudes> grid,
                HbarConvention hb)
      : rep_(std::move(grid)), hbar_(hb) {
    density_norm_ = std::get<std::shared_ptr<const detail::SampledAmplitudes>>(rep_)
                        ->interpolant_norm();
  }

  double hbar() const { return hbar_.hbar; }
  const GaussianMomentum* gaussian() const {
    return std::get_if<GaussianMomentum>(&rep_);
  }
  std::shared_ptr<const detail::SampledAmplitudes> grid() const {
    if (auto* p = std::get_if<std::shared_ptr<const detail::SampledAmplitudes>>(&rep_))
      return *p;
    return nullptr;
  }

  double density_at(double p) const {
    if (const auto* g = gaussian()) {
      const double u = (p - g->p0) / g->width;
      return std::exp(-u * u) / (std::sqrt(std::numbers::pi) * g->width);
    }
    return grid()->density_at(p) / density_norm_;
  }

  Density density() const {
    if (const auto* g = gaussian()) {
      const GaussianMomentum gm = *g;
      return Density(
          [gm](double p) {
            const double u = (p - gm.p0) / gm.width;
            return std::exp(-u * u) / (std::sqrt(std::numbers::pi) * gm.width);
          },
          gm.p0, gm.width);
    }
    auto carrier = grid();
    const double lo = carrier->min_coord();
    const double hi = carrier->max_coord();
    const double inv_norm = 1.0 / density_norm_;
    Density d(
        [carrier, lo, hi, inv_norm](double p) {
          return (p >= lo && p <= hi) ? inv_norm * carrier->density_at(p) : 0.0;
        },
        0.5 * (lo + hi), 0.5 * (hi - lo), Interval{lo, hi});
    d.set_segment_mass([carrier, inv_norm](double a, double b) {
      return inv_norm * carrier->mass_between(a, b);
    });
    return d;
  }

  double moment(int order, const Domain& domain,
                const QuadOptions& opt = default_quad_options()) const {
    return density_moment(density(), order, domain, opt);
  }
  double mean_p() const { return moment(1, Domain::full_line()); }
  double variance_p() const {
    const double m1 = moment(1, Domain::full_line());
    return moment(2, Domain::full_line()) - m1 * m1;
  }

 private:
  std::variant<GaussianMomentum,
               std::shared_ptr<const detail::SampledAmplitudes>>
      rep_;
  HbarConvention hbar_;
  double density_norm_ = 1.0;
};

/// psi~(p) = (2 pi hbar)^{-1/2} integral e^{-i p x / hbar} psi(x) dx,
/// evaluated at a single p. Analytic for Gaussian states; for grids the
/// interpolant is integrated piecewise in closed form.
inline std::complex<double> momentum_amplitude_at(const QuantumState& state,
                                                  double p) {
  const double hbar = state.hbar();
  if (const auto* g = state.gaussian()) {
    const double w = hbar / g->sigma();
    const double mag = std::pow(std::numbers::pi * w * w, -0.25) *
                       std::exp(-0.5 * std::pow((p - g->p0()) / w, 2));
    const double phase = -g->x0() * (p - 0.5 * g->p0()) / hbar;
    return std::polar(mag, phase);
  }
  const auto carrier = state.grid()->carrier();
  return carrier->oscillatory_integral(p / hbar) /
         std::sqrt(2.0 * std::numbers::pi * hbar);
}

/// Transform to the momentum representation. For grids this is a discrete
/// transform with pre/post phase corrections so the output matches the
/// continuum convention including the x_min offset; the momentum grid spacing
/// is dp = 2 pi hbar / (n dx). The accuracy contract requires the density to
/// be below edge_density_tol at both position and momentum grid edges,
/// otherwise a resolution_error names the largest faithful |p|.
inline MomentumState to_momentum(const QuantumState& state,
                                 const FourierOptions& opt = {}) {
  const double hbar = state.hbar();
  if (const auto* g = state.gaussian())
    return MomentumState(GaussianMomentum{hbar / g->sigma(), g->p0(), g->x0()},
                         state.hbar_convention());

  const GridState& grid = *state.grid();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const double x_min = grid.x_min();
  const double p_nyquist = std::numbers::pi * hbar / dx;
  if (opt.enforce_contract) {
    const auto& s = grid.samples();
    const double edge = std::max(std::norm(s.front()), std::norm(s.back()));
    if (edge > opt.edge_density_tol)
      throw resolution_error(
          "to_momentum: state density does not vanish at the grid edges; "
          "momenta are faithful only up to |p| = pi*hbar/dx",
          p_nyquist);
  }
  const double dp = 2.0 * std::numbers::pi * hbar / (double(n) * dx);
  const long n0 = long(n) / 2;
  const double p_min = -double(n0) * dp;

  std::vector<std::complex<double>> psi_t(n);
  if (n < opt.min_fft_size) {
    for (std::size_t m = 0; m < n; ++m)
      psi_t[m] = momentum_amplitude_at(state, p_min + dp * double(m));
  } else {
    std::vector<std::complex<double>> work(n);
    const auto& s = grid.samples();
    for (std::size_t j = 0; j < n; ++j) {
      // e^{2 pi i n0 j / n}, angle reduced exactly via integer arithmetic
      const unsigned long long r =
          (static_cast<unsigned long long>(n0) * j) % n;
      work[j] = s[j] * std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(n));
    }
    auto spectrum = detail::dft(work, false);
    const double amp = dx / std::sqrt(2.0 * std::numbers::pi * hbar);
    for (std::size_t m = 0; m < n; ++m) {
      const double p = p_min + dp * double(m);
      psi_t[m] = amp * std::polar(1.0, -p * x_min / hbar) * spectrum[m];
    }
  }
  if (opt.enforce_contract) {
    const double edge =
        std::max(std::norm(psi_t.front()), std::norm(psi_t.back()));
    if (edge > opt.edge_density_tol)
      throw resolution_error(
          "to_momentum: momentum density does not vanish at the transform "
          "window edges; grid is too coarse beyond |p| = pi*hbar/dx",
          p_nyquist);
  }
  return MomentumState(std::make_shared<const detail::SampledAmplitudes>(
                           std::move(psi_t), p_min, dp),
                       state.hbar_convention());
}

/// |1 - integral of the momentum density|. For grid states the density is the
/// continuum transform of the interpolant, integrated over the representable
/// window [-pi hbar/dx, pi hbar/dx]; this is independent of the discrete
/// transform path and detects truncated or under-resolved grids.
inline double plancherel_check(const QuantumState& state,
                               const QuadOptions& opt = default_quad_options()) {
  const double hbar = state.hbar();
  if (state.gaussian()) {
    MomentumState mom = to_momentum(state);
    const double q = density_moment(mom.density(), 0, Domain::full_line(), opt);
    return std::fabs(1.0 - q);
  }
  const GridState& grid = *state.grid();
  const double p_nyquist = std::numbers::pi * hbar / grid.dx();
  auto f = [&state](double p) {
    return std::norm(momentum_amplitude_at(state, p));
  };
  // momentum-space decay scale of a state of spatial width L is ~ hbar/L
  const double width = 0.5 * (grid.x_max() - grid.x_min());
  QuadHints hints{0.0, std::max(1e-6, hbar / std::max(width, 1e-6)), {}};
  const double q =
      integrate(f, Domain::segment(-p_nyquist, p_nyquist), hints, opt);
  return std::fabs(1.0 - q);
}

}  // namespace egrain
