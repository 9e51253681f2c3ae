// Closed-form and brute-force oracles used by the tests. Everything here is
// independent of the library's quadrature/binning path: Gaussian bin masses
// come from std::erf, tail moments from the analytic antiderivative.
#pragma once

#include <cmath>
#include <vector>

namespace oracles {

// mass of rho(x) = exp(-((x-x0)/sigma)^2) / (sqrt(pi) sigma) on [a, b]
inline double gaussian_mass(double sigma, double x0, double a, double b) {
  return 0.5 * (std::erf((b - x0) / sigma) - std::erf((a - x0) / sigma));
}

// midpoint-convention bin mass q_k for the same density
inline double gaussian_bin(double sigma, double x0, double delta, long k) {
  return gaussian_mass(sigma, x0, (k - 0.5) * delta, (k + 0.5) * delta);
}

// -sum q_k ln q_k over all midpoint bins (k swept until the terms vanish)
inline double gaussian_midpoint_entropy(double sigma, double x0, double delta) {
  double sum = 0.0;
  const long reach = long(std::ceil((std::fabs(x0) + 40.0 * sigma) / delta)) + 2;
  for (long k = -reach; k <= reach; ++k) {
    const double q = gaussian_bin(sigma, x0, delta, k);
    if (q > 0.0) sum -= q * std::log(q);
  }
  return sum;
}

// integral of x^2 rho over [w, inf) for the centered Gaussian (x0 = 0):
// sigma^2 * [ a e^{-a^2} / (2 sqrt(pi)) + erfc(a)/4 ], a = w/sigma
inline double gaussian_upper_tail_x2(double sigma, double w) {
  const double a = w / sigma;
  return sigma * sigma *
         (a * std::exp(-a * a) / (2.0 * std::sqrt(M_PI)) + 0.25 * std::erfc(a));
}

// both tails of the centered Gaussian
inline double gaussian_tail_x2(double sigma, double w) {
  return 2.0 * gaussian_upper_tail_x2(sigma, w);
}

// tail mass |x| >= w for the centered Gaussian
inline double gaussian_tail_mass(double sigma, double w) {
  return std::erfc(w / sigma);
}

// second central difference, for convexity probes
template <class F>
double second_difference(const F& f, double x, double h) {
  return (f(x + h) + f(x - h) - 2.0 * f(x)) / (h * h);
}

}  // namespace oracles
