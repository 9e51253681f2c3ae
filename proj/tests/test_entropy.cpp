#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "egrain/entropy.hpp"
#include "egrain/fourier.hpp"
#include "support/oracles.hpp"

using namespace egrain;

namespace {

Density gaussian_density(double sigma, double x0) {
  return Density(
      [sigma, x0](double x) {
        const double u = (x - x0) / sigma;
        return std::exp(-u * u) / (std::sqrt(M_PI) * sigma);
      },
      x0, sigma);
}

DiscreteDistribution hand_distribution(std::vector<double> probs) {
  DiscreteDistribution d;
  d.k_min = 0;
  d.probs = std::move(probs);
  d.delta = 1.0;
  d.xi0 = 0.0;
  d.covered_mass = 1.0;
  d.tail_mass = 0.0;
  d.finite_window = true;
  d.window_m = 0;
  return d;
}

}  // namespace

TEST_CASE("uniform four-bin distribution has entropy ln 4") {
  const auto h = discrete_entropy(hand_distribution({0.25, 0.25, 0.25, 0.25}));
  CHECK(h.value == Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(h.value == Approx(1.386294).margin(5e-7));
}

TEST_CASE("deterministic outcome has zero entropy, 0 ln 0 branch included") {
  const auto h = discrete_entropy(hand_distribution({1.0, 0.0, 0.0}));
  CHECK(h.value == 0.0);
}

TEST_CASE("full-line gaussian entropy matches the erf summation oracle") {
  const auto dist = bin_probabilities(gaussian_density(1.0, 0.0),
                                      BinGrid::full_line(1.0, -0.5));
  const auto h = discrete_entropy(dist);
  CHECK(h.kind == EntropyKind::discrete_full);
  CHECK(h.value == Approx(oracles::gaussian_midpoint_entropy(1.0, 0.0, 1.0))
                       .margin(1e-9));
  CHECK(h.truncation_bound >= 0.0);
  CHECK(h.truncation_bound < 1e-10);
}

TEST_CASE("discrete entropies are nonnegative (random distributions)") {
  std::mt19937 rng(20240517);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + int(u(rng) * 12);
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    double sum = 0.0;
    for (double& v : p) sum += (v = u(rng) + 1e-12);
    for (double& v : p) v /= sum;
    CHECK(discrete_entropy(hand_distribution(std::move(p))).value >= 0.0);
  }
}

TEST_CASE("continuous gaussian entropy: 0.5(1 + ln pi) at sigma 1") {
  const double s = continuous_entropy(gaussian_density(1.0, 0.0), Domain::full_line());
  CHECK(s == Approx(0.5 * (1.0 + std::log(M_PI))).epsilon(1e-11));
  CHECK(s == Approx(1.072365).margin(5e-7));
}

TEST_CASE("position and momentum entropies saturate the continuous relation") {
  const QuantumState psi = make_gaussian(1.0, 0.0, 0.0, 1.0);
  const double sx = continuous_entropy(psi.position_density(), Domain::full_line());
  const double sp =
      continuous_entropy(to_momentum(psi).density(), Domain::full_line());
  CHECK(sx + sp == Approx(1.0 + std::log(M_PI)).margin(1e-10));
}

TEST_CASE("uniform density on [0, 2] has entropy ln 2") {
  const double s = continuous_entropy(uniform_density(0.0, 2.0), Domain::full_line());
  CHECK(s == Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("narrow densities drive the continuous entropy negative") {
  const double s =
      continuous_entropy(gaussian_density(0.1, 0.0), Domain::full_line());
  CHECK(s < 0.0);
  CHECK(s == Approx(0.5 * std::log(M_PI * std::numbers::e * 0.01)).epsilon(1e-10));
}

TEST_CASE("dilation shifts the continuous entropy by ln a") {
  const double s1 = continuous_entropy(gaussian_density(1.0, 0.0), Domain::full_line());
  for (double a : {0.5, 2.0, 7.0}) {
    const double sa =
        continuous_entropy(gaussian_density(a, 0.0), Domain::full_line());
    CHECK(sa - s1 == Approx(std::log(a)).margin(1e-10));
  }
}

TEST_CASE("large-delta limits: border ln 2, midpoint 0, localized 0") {
  const QuantumState sym = make_gaussian(1.0, 0.0, 0.0);
  CHECK(large_delta_limit_probe(sym, BinConvention::border, 100.0).value ==
        Approx(std::log(2.0)).margin(1e-6));
  CHECK(large_delta_limit_probe(sym, BinConvention::midpoint, 100.0).value ==
        Approx(0.0).margin(1e-6));

  const QuantumState right = make_gaussian(1.0, 50.0, 0.0);
  CHECK(large_delta_limit_probe(right, BinConvention::border, 100.0).value ==
        Approx(0.0).margin(1e-6));
}

TEST_CASE("finite-window entropy grows with M toward the full value") {
  const Density rho = gaussian_density(1.0, 0.0);
  const double full =
      discrete_entropy(bin_probabilities(rho, BinGrid::full_line(0.5, -0.25)))
          .value;
  double prev = -1.0;
  for (int m : {0, 1, 2, 4, 8, 16}) {
    const double hm =
        discrete_entropy(bin_probabilities(rho, BinGrid::finite(0.5, m))).value;
    CHECK(hm >= prev - 1e-12);
    CHECK(hm <= full + 1e-9);
    prev = hm;
  }
  CHECK(prev == Approx(full).margin(1e-9));
}

TEST_CASE("grid pipeline reproduces closed-form superposition entropies") {
  // psi ~ exp(-(x-3)^2/2) + exp(-(x+3)^2/2), hbar = 1:
  //   rho(x)  = (g3 + g-3)^2 / (2 sqrt(pi) (1 + e^-9))
  //   rho~(p) = 2 cos^2(3p) e^{-p^2} / (sqrt(pi) (1 + e^-9))
  const double z = 2.0 * std::sqrt(M_PI) * (1.0 + std::exp(-9.0));
  const Density rho_x(
      [z](double x) {
        const double a = std::exp(-0.5 * (x - 3.0) * (x - 3.0)) +
                         std::exp(-0.5 * (x + 3.0) * (x + 3.0));
        return a * a / z;
      },
      0.0, 3.0);
  const Density rho_p(
      [](double p) {
        const double c = std::cos(3.0 * p);
        return 2.0 * c * c * std::exp(-p * p) /
               (std::sqrt(M_PI) * (1.0 + std::exp(-9.0)));
      },
      0.0, 1.0);
  CHECK(density_moment(rho_x, 0, Domain::full_line()) == Approx(1.0).margin(1e-11));
  CHECK(density_moment(rho_p, 0, Domain::full_line()) == Approx(1.0).margin(1e-11));

  const std::size_t n = 8192;
  const double lo = -64.0, hi = 64.0;
  const double dx = (hi - lo) / double(n - 1);
  std::vector<std::complex<double>> samples(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = lo + dx * double(j);
    samples[j] = std::exp(-0.5 * (x - 3.0) * (x - 3.0)) +
                 std::exp(-0.5 * (x + 3.0) * (x + 3.0));
  }
  const QuantumState psi = make_grid_state(std::move(samples), lo, dx, 1.0);

  const double sx_exact = continuous_entropy(rho_x, Domain::full_line());
  const double sx_grid =
      continuous_entropy(psi.position_density(), Domain::full_line());
  CHECK(sx_grid == Approx(sx_exact).margin(1e-7));

  const double sp_exact = continuous_entropy(rho_p, Domain::full_line());
  const double sp_grid =
      continuous_entropy(to_momentum(psi).density(), Domain::full_line());
  CHECK(sp_grid == Approx(sp_exact).margin(1e-7));

  // binned entropies agree too
  const double hx_exact =
      discrete_entropy(bin_probabilities(rho_x, BinGrid::full_line(0.7, -0.35))).value;
  const double hx_grid =
      discrete_entropy(bin_probabilities(psi, BinGrid::full_line(0.7, -0.35))).value;
  CHECK(hx_grid == Approx(hx_exact).margin(1e-8));
}

TEST_CASE("entropy kinds follow the window") {
  const Density rho = gaussian_density(1.0, 0.0);
  const auto full = discrete_entropy(bin_probabilities(rho, BinGrid::full_line(1.0, -0.5)));
  CHECK(full.kind == EntropyKind::discrete_full);
  CHECK(full.window_m == -1);
  const auto fin = discrete_entropy(bin_probabilities(rho, BinGrid::finite(1.0, 2)));
  CHECK(fin.kind == EntropyKind::discrete_finite);
  CHECK(fin.window_m == 2);
  CHECK(fin.truncation_bound == 0.0);
}
