#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "egrain/errors.hpp"

namespace egrain {

inline constexpr double kSpheroidalMaxC = 50.0;

/// Prolate spheroidal (m=0, n=0) eigensystem: smallest eigenvalue of the
/// Legendre-expansion recurrence and the expansion coefficients d_r (even r
/// only), normalized so that sum_r d_r = 1.
struct SpheroidalSolution {
  double c = 0.0;
  double eigenvalue = 0.0;
  std::vector<double> coeffs;  // d_0, d_2, d_4, ...
  int truncation = 0;          // number of retained even-order coefficients
  double residual = 0.0;       // relative recurrence defect
};

namespace detail {

// Three-term recurrence coefficients for the m = 0 angular expansion
// S(c,eta) = sum'_r d_r P_r(eta):
//   A_r d_{r+2} + (B_r - lambda) d_r + C_r d_{r-2} = 0.
inline double sph_rec_a(double c2, int r) {
  return double(r + 2) * double(r + 1) * c2 /
         ((2.0 * r + 3.0) * (2.0 * r + 5.0));
}
inline double sph_rec_b(double c2, int r) {
  return double(r) * (r + 1.0) +
         c2 * (2.0 * r * (r + 1.0) - 1.0) / ((2.0 * r - 1.0) * (2.0 * r + 3.0));
}
inline double sph_rec_c(double c2, int r) {
  return double(r) * double(r - 1) * c2 /
         ((2.0 * r - 3.0) * (2.0 * r - 1.0));
}

/// Eigenvalue count below x for a symmetric tridiagonal matrix (Sturm).
inline int sturm_count_below(const std::vector<double>& diag,
                             const std::vector<double>& off, double x) {
  constexpr double pivmin = 1e-300;
  int count = 0;
  double d = 1.0;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    const double offsq = j ? off[j - 1] * off[j - 1] : 0.0;
    d = diag[j] - x - offsq / d;
    if (std::fabs(d) <= pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

inline double smallest_eigenvalue(const std::vector<double>& diag,
                                  const std::vector<double>& off) {
  const std::size_t n = diag.size();
  double lo = diag[0], hi = diag[0];
  for (std::size_t j = 0; j < n; ++j) {
    const double radius = (j ? std::fabs(off[j - 1]) : 0.0) +
                          (j + 1 < n ? std::fabs(off[j]) : 0.0);
    lo = std::min(lo, diag[j] - radius);
    hi = std::max(hi, diag[j] + radius);
  }
  const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(diag, off, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Backward (Miller) recurrence for the minimal solution given lambda. The
/// ground-state coefficients decay superexponentially in r, so recurring
/// downward from a tiny tail seed is stable; rescaling uses exact powers of
/// two, which keeps the arithmetic bit-identical across different truncations
/// in the shared index range.
inline std::vector<double> backward_coefficients(double c2, double lambda,
                                                 int terms) {
  std::vector<double> d(static_cast<std::size_t>(terms), 0.0);
  constexpr double kBig = 0x1p+600;
  constexpr double kSmall = 0x1p-600;
  double next = 0.0;
  double cur = kSmall;  // arbitrary tail seed; overall scale cancels later
  d[std::size_t(terms) - 1] = cur;
  for (int j = terms - 1; j >= 1; --j) {
    const int r = 2 * j;
    double prev = ((lambda - sph_rec_b(c2, r)) * cur - sph_rec_a(c2, r) * next) /
                  sph_rec_c(c2, r);
    if (std::fabs(prev) > kBig) {
      prev *= kSmall;
      cur *= kSmall;
      next *= kSmall;
      for (int t = j; t < terms; ++t) d[std::size_t(t)] *= kSmall;
    }
    next = cur;
    cur = prev;
    d[std::size_t(j) - 1] = prev;
  }
  if (d[0] < 0.0)
    for (double& y : d) y = -y;
  return d;
}

/// Rayleigh quotient of the symmetric tridiagonal form at v_j = d_j/sqrt(4j+1).
inline double rayleigh_quotient(double c2, const std::vector<double>& dt) {
  const int terms = int(dt.size());
  std::vector<double> v(dt.size());
  for (int j = 0; j < terms; ++j)
    v[std::size_t(j)] = dt[std::size_t(j)] / std::sqrt(4.0 * j + 1.0);
  double vmax = 0.0;
  for (double y : v) vmax = std::max(vmax, std::fabs(y));
  const int ex = std::ilogb(vmax);
  for (double& y : v) y = std::scalbn(y, -ex);  // exact power-of-two scaling
  double num = 0.0, den = 0.0;
  for (int j = 0; j < terms; ++j) {
    num += sph_rec_b(c2, 2 * j) * v[std::size_t(j)] * v[std::size_t(j)];
    den += v[std::size_t(j)] * v[std::size_t(j)];
    if (j + 1 < terms)
      num += 2.0 *
             std::sqrt(sph_rec_a(c2, 2 * j) * sph_rec_c(c2, 2 * j + 2)) *
             v[std::size_t(j)] * v[std::size_t(j) + 1];
  }
  return num / den;
}

struct RawSpheroidal {
  double lambda = 0.0;
  std::vector<double> dtilde;  // minimal solution, arbitrary overall scale
  double residual = 0.0;
};

inline double raw_residual(double c2, double lambda,
                           const std::vector<double>& dt) {
  const int terms = int(dt.size());
  double dmax = 0.0;
  for (double y : dt) dmax = std::max(dmax, std::fabs(y));
  double defect = 0.0, scale = 1.0;
  for (int j = 0; j < terms; ++j) {
    const int r = 2 * j;
    const double cl = j > 0 ? sph_rec_c(c2, r) : 0.0;
    const double cu = j + 1 < terms ? sph_rec_a(c2, r) : 0.0;
    const double row = (j > 0 ? cl * dt[std::size_t(j) - 1] : 0.0) +
                       (sph_rec_b(c2, r) - lambda) * dt[std::size_t(j)] +
                       (j + 1 < terms ? cu * dt[std::size_t(j) + 1] : 0.0);
    defect = std::max(defect, std::fabs(row));
    scale = std::max(scale, std::fabs(cl) +
                                std::fabs(sph_rec_b(c2, r) - lambda) +
                                std::fabs(cu));
  }
  const double implied_next =
      std::fabs(sph_rec_c(c2, 2 * terms) * dt[std::size_t(terms) - 1]) /
      std::max(std::fabs(sph_rec_b(c2, 2 * terms) - lambda), 1.0);
  return std::max(defect / (dmax * scale), implied_next / dmax);
}

inline RawSpheroidal raw_spheroidal(double c, int terms) {
  const double c2 = c * c;
  std::vector<double> diag(static_cast<std::size_t>(terms), 0.0);
  std::vector<double> off(static_cast<std::size_t>(terms) - 1, 0.0);
  for (int j = 0; j < terms; ++j) diag[std::size_t(j)] = sph_rec_b(c2, 2 * j);
  for (int j = 0; j + 1 < terms; ++j)
    off[std::size_t(j)] =
        std::sqrt(sph_rec_a(c2, 2 * j) * sph_rec_c(c2, 2 * j + 2));
  double lambda = smallest_eigenvalue(diag, off);
  std::vector<double> dt = backward_coefficients(c2, lambda, terms);
  // two Rayleigh-quotient polish rounds pin lambda to the truncated matrix
  for (int round = 0; round < 2; ++round) {
    lambda = rayleigh_quotient(c2, dt);
    dt = backward_coefficients(c2, lambda, terms);
  }
  RawSpheroidal out;
  out.lambda = lambda;
  out.residual = raw_residual(c2, lambda, dt);
  out.dtilde = std::move(dt);
  return out;
}

inline RawSpheroidal raw_spheroidal_converged(double c, int min_terms) {
  int terms = std::max({min_terms, int(std::ceil(2.0 * c)) + 30, 8});
  constexpr int kCap = 1 << 14;
  for (;; terms *= 2) {
    RawSpheroidal raw = raw_spheroidal(c, terms);
    if (raw.residual < 1e-12) return raw;
    if (2 * terms > kCap)
      throw numeric_error("spheroidal_eigensystem: series did not converge",
                          raw.residual);
  }
}

}  // namespace detail

/// Spherical Bessel functions j_0..j_max_order at x >= 0. Upward recurrence
/// below the turning point, Miller's downward recurrence above it, matched at
/// order floor(x)-1 where j_n(x) is safely positive.
inline std::vector<double> spherical_bessel_j(int max_order, double x) {
  if (max_order < 0)
    throw std::invalid_argument("spherical_bessel_j: negative order");
  if (!(x >= 0.0))
    throw std::invalid_argument("spherical_bessel_j: negative argument");
  std::vector<double> j(std::size_t(max_order) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double j0 = std::sin(x) / x;
  j[0] = j0;
  if (max_order == 0) return j;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;

  const int turning = std::max(0, int(std::floor(x)) - 1);
  if (max_order <= turning) {
    // fully below the turning point: upward recurrence is stable
    j[1] = j1;
    for (int nn = 1; nn < max_order; ++nn)
      j[nn + 1] = (2.0 * nn + 1.0) / x * j[nn] - j[nn - 1];
    return j;
  }
  const int up = std::min(max_order, turning);
  if (up >= 1) {
    j[1] = j1;
    for (int nn = 1; nn < up; ++nn)
      j[nn + 1] = (2.0 * nn + 1.0) / x * j[nn] - j[nn - 1];
  }

  const int start = max_order + 40 + int(x);
  std::vector<double> f(std::size_t(max_order) + 1, 0.0);
  double f_np1 = 0.0;
  double f_n = 1e-300;
  for (int nn = start; nn > up; --nn) {
    double f_nm1 = (2.0 * nn + 1.0) / x * f_n - f_np1;
    if (std::fabs(f_nm1) > 1e250) {
      const double sc = 1e-250;
      f_nm1 *= sc;
      f_n *= sc;
      for (double& y : f) y *= sc;
    }
    f_np1 = f_n;
    f_n = f_nm1;
    if (nn - 1 <= max_order) f[std::size_t(nn - 1)] = f_n;
  }
  const double ref = (up == 0) ? j0 : j[std::size_t(up)];
  const double alpha = ref / f[std::size_t(up)];
  for (int nn = up; nn <= max_order; ++nn) j[std::size_t(nn)] = f[std::size_t(nn)] * alpha;
  if (up >= 1) j[std::size_t(up)] = ref;  // keep the stable value exactly
  return j;
}

/// Solve the m=0, n=0 prolate eigenproblem: smallest eigenvalue of the
/// symmetric form of the Legendre recurrence (the orthonormal-Legendre
/// similarity gives off-diagonals sqrt(A_r C_{r+2}) and d_r = v_r *
/// sqrt(2r+1)). Truncation starts at 2c+30 even terms and doubles until the
/// relative recurrence defect and the implied first neglected coefficient
/// drop below 1e-12.
inline SpheroidalSolution spheroidal_eigensystem(double c, int min_terms = 0) {
  if (!(c >= 0.0) || c > kSpheroidalMaxC)
    throw std::domain_error("spheroidal_eigensystem: c outside [0, 50]");
  if (c == 0.0) return {0.0, 0.0, {1.0}, 1, 0.0};
  detail::RawSpheroidal raw = detail::raw_spheroidal_converged(c, min_terms);
  std::vector<double> d = raw.dtilde;
  double sum = 0.0, comp = 0.0;
  for (double y : d) {
    const double t = sum + (y - comp);
    comp = (t - sum) - (y - comp);
    sum = t;
  }
  for (double& y : d) y /= sum;
  SpheroidalSolution out;
  out.c = c;
  out.eigenvalue = raw.lambda;
  out.truncation = int(d.size());
  out.residual = raw.residual;
  out.coeffs = std::move(d);
  return out;
}

/// Radial prolate spheroidal function of the first kind at radial coordinate
/// 1: R00(c, 1) = sum_r (-1)^{r/2} d_r j_r(c) / sum_r d_r over even r. The
/// ratio is normalization independent; with sum d_r = 1 the numerator is the
/// value. Continuous in c with R00(0, 1) = 1.
inline double radial_s1_at_one(double c, int min_terms = 0) {
  if (!(c >= 0.0) || c > kSpheroidalMaxC)
    throw std::domain_error("radial_s1_at_one: c outside [0, 50]");
  if (c == 0.0) return 1.0;
  // S is an eigenfunction of the finite Fourier kernel with eigenvalue
  // 2 R00(c,1); evaluating the eigenrelation at x = 0 gives
  //   R00(c,1) = d_0 / S(0),  S(0) = sum_k (-1)^k d_{2k} (2k-1)!!/(2k)!!.
  // The coefficients alternate in sign, so every term of S(0) is positive:
  // unlike the Bessel series at eta = 1 this route has no cancellation and
  // stays fully accurate up to c = 50.
  const detail::RawSpheroidal raw = detail::raw_spheroidal_converged(c, min_terms);
  const int terms = int(raw.dtilde.size());
  double s0 = 0.0, comp = 0.0;
  double legendre_ratio = 1.0;  // (2k-1)!!/(2k)!!
  for (int k = 0; k < terms; ++k) {
    if (k > 0) legendre_ratio *= (2.0 * k - 1.0) / (2.0 * k);
    const double sign = (k % 2) ? -1.0 : 1.0;
    const double y = sign * raw.dtilde[std::size_t(k)] * legendre_ratio - comp;
    const double t = s0 + y;
    comp = (t - s0) - y;
    s0 = t;
  }
  return raw.dtilde[0] / s0;
}

/// CSV dump (c, eigenvalue, R00_at_1) for external cross-checking.
inline void write_spheroidal_table(std::ostream& os,
                                   const std::vector<double>& cs) {
  char buf[96];
  os << "c,eigenvalue,R00_at_1\n";
  for (double c : cs) {
    const double eig = (c == 0.0) ? 0.0 : spheroidal_eigensystem(c).eigenvalue;
    const double r = radial_s1_at_one(c);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c, eig, r);
    os << buf;
  }
}

}  // namespace egrain
