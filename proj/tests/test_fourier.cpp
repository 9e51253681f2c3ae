#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "egrain/entropy.hpp"
#include "egrain/fourier.hpp"

using namespace egrain;

namespace {

QuantumState sampled_gaussian(double sigma, double x0, double p0, double lo,
                              double hi, std::size_t n, double hbar = 1.0) {
  const QuantumState analytic = make_gaussian(sigma, x0, p0, hbar);
  std::vector<std::complex<double>> samples(n);
  const double dx = (hi - lo) / double(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    samples[j] = analytic.amplitude_at(lo + dx * double(j));
  return make_grid_state(std::move(samples), lo, dx, hbar);
}

std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      s += a[j] * std::polar(1.0, -2.0 * M_PI * double(m * j % n) / double(n));
    out[m] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("dft agrees with the quadratic-time definition") {
  for (std::size_t n : {8u, 12u, 17u, 32u}) {
    std::vector<std::complex<double>> a(n);
    for (std::size_t j = 0; j < n; ++j)
      a[j] = {std::cos(0.7 * double(j) + 0.2), std::sin(1.3 * double(j))};
    const auto fast = detail::dft(a, false);
    const auto slow = naive_dft(a);
    for (std::size_t m = 0; m < n; ++m)
      CHECK(std::abs(fast[m] - slow[m]) < 1e-11 * double(n));
    // round trip
    const auto back = detail::dft(fast, true);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(back[j] - a[j]) < 1e-12);
  }
}

TEST_CASE("self-dual gaussian momentum density") {
  const MomentumState mom = to_momentum(make_gaussian(1.0, 0.0, 0.0, 1.0));
  for (double p : {0.0, 0.5, 1.0, 2.0})
    CHECK(mom.density_at(p) ==
          Approx(std::exp(-p * p) / std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("momentum centroid follows p0") {
  const MomentumState mom = to_momentum(make_gaussian(1.0, 0.0, 3.0, 1.0));
  CHECK(mom.mean_p() == Approx(3.0).margin(1e-9));
}

TEST_CASE("gaussian momentum width is hbar/sigma") {
  const MomentumState mom = to_momentum(make_gaussian(2.0, 0.0, 0.0, 1.0));
  // variance hbar^2/(2 sigma^2)
  CHECK(mom.variance_p() == Approx(1.0 / 8.0).epsilon(1e-9));
}

TEST_CASE("the family saturates sigma_x sigma_p = hbar/2") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (double hbar : {1.0, 0.3}) {
      const QuantumState psi = make_gaussian(sigma, 0.3, 0.5, hbar);
      const double product =
          std::sqrt(psi.variance_x() * to_momentum(psi).variance_p());
      CHECK(product == Approx(0.5 * hbar).margin(1e-9));
    }
  }
}

TEST_CASE("grid transform matches the closed form to 1e-8 sup norm") {
  const QuantumState grid = sampled_gaussian(2.0, 0.0, 0.0, -20.0, 20.0, 2048);
  const MomentumState mom = to_momentum(grid);
  const auto carrier = mom.grid();
  REQUIRE(carrier != nullptr);
  const double w = 0.5;  // hbar/sigma
  double worst = 0.0;
  for (std::size_t m = 0; m < carrier->size(); ++m) {
    const double p = carrier->min_coord() + carrier->step() * double(m);
    const double exact = std::exp(-(p / w) * (p / w)) / (std::sqrt(M_PI) * w);
    worst = std::max(worst, std::fabs(std::norm(carrier->values()[m]) - exact));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("discrete parseval is exact for the grid transform") {
  const QuantumState grid = sampled_gaussian(1.0, 0.3, 0.7, -12.0, 12.0, 1024);
  const MomentumState mom = to_momentum(grid);
  const auto carrier = mom.grid();
  double mass = 0.0;
  for (const auto& a : carrier->values()) mass += std::norm(a);
  mass *= carrier->step();
  CHECK(mass == Approx(1.0).margin(1e-12));
}

TEST_CASE("plancherel check: analytic, resolved grid, truncated grid") {
  CHECK(plancherel_check(make_gaussian(1.0, 0.0, 0.0)) < 1e-12);

  const QuantumState resolved = sampled_gaussian(1.0, 0.0, 0.0, -12.0, 12.0, 8192);
  CHECK(plancherel_check(resolved) < 1e-9);

  const QuantumState truncated = sampled_gaussian(1.0, 0.0, 0.0, -2.0, 2.0, 32);
  CHECK(plancherel_check(truncated) > 1e-4);
}

TEST_CASE("edge-density contract fires a resolution error") {
  const QuantumState truncated = sampled_gaussian(1.0, 0.0, 0.0, -2.0, 2.0, 64);
  CHECK_THROWS_AS(to_momentum(truncated), resolution_error);
  try {
    to_momentum(truncated);
  } catch (const resolution_error& e) {
    const double dx = truncated.grid()->dx();
    CHECK(e.max_faithful_momentum() == Approx(M_PI / dx).epsilon(1e-12));
  }
  // diagnostic path still works on the same state
  CHECK_NOTHROW(plancherel_check(truncated));
}

TEST_CASE("parity: real even states have real even transforms") {
  // two-lobe even state
  const std::size_t n = 2048;
  std::vector<std::complex<double>> samples(n);
  const double lo = -16.0, hi = 16.0;
  const double dx = (hi - lo) / double(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = lo + dx * double(j);
    samples[j] = std::exp(-0.5 * (x - 3.0) * (x - 3.0)) +
                 std::exp(-0.5 * (x + 3.0) * (x + 3.0));
  }
  const QuantumState psi = make_grid_state(std::move(samples), lo, dx);
  const MomentumState mom = to_momentum(psi);
  const auto carrier = mom.grid();
  for (std::size_t m = 0; m < carrier->size(); m += 37) {
    const double p = carrier->min_coord() + carrier->step() * double(m);
    CHECK(std::fabs(std::imag(carrier->values()[m])) < 1e-10);
    if (p > 0.0 && carrier->contains(-p))
      CHECK(std::norm(carrier->value_at(-p)) ==
            Approx(std::norm(carrier->value_at(p))).margin(1e-10));
  }
  // gaussian parity too
  const MomentumState gm = to_momentum(make_gaussian(1.0, 0.0, 0.0));
  CHECK(gm.density_at(0.8) == Approx(gm.density_at(-0.8)).epsilon(1e-13));
}

TEST_CASE("modulation translates the momentum density") {
  const double a = 1.5;
  // analytic: exact
  const MomentumState base = to_momentum(make_gaussian(1.0, 0.0, 0.0));
  const MomentumState moved = to_momentum(make_gaussian(1.0, 0.0, a));
  for (double p : {-1.0, 0.0, 0.7, 2.0})
    CHECK(moved.density_at(p + a) == Approx(base.density_at(p)).epsilon(1e-12));

  // grid: compare the transform values on their own nodes against the
  // translated closed form, within 1e-8
  const QuantumState mod = sampled_gaussian(1.0, 0.0, a, -14.0, 14.0, 2048);
  const MomentumState mm = to_momentum(mod);
  const auto carrier = mm.grid();
  for (std::size_t m = 0; m < carrier->size(); m += 101) {
    const double p = carrier->min_coord() + carrier->step() * double(m);
    const double translated = std::exp(-(p - a) * (p - a)) / std::sqrt(M_PI);
    CHECK(std::norm(carrier->values()[m]) == Approx(translated).margin(1e-8));
  }
}

TEST_CASE("non-power-of-two grids transform through the chirp path") {
  const QuantumState grid = sampled_gaussian(1.0, 0.2, 0.4, -13.0, 13.0, 1000);
  const MomentumState mom = to_momentum(grid);
  const auto carrier = mom.grid();
  REQUIRE(carrier->size() == 1000);
  // discrete parseval still exact
  double mass = 0.0;
  for (const auto& a : carrier->values()) mass += std::norm(a);
  mass *= carrier->step();
  CHECK(mass == Approx(1.0).margin(1e-12));
  // values match the closed form
  double worst = 0.0;
  for (std::size_t m = 0; m < carrier->size(); m += 7) {
    const double p = carrier->min_coord() + carrier->step() * double(m);
    const double exact =
        std::exp(-(p - 0.4) * (p - 0.4)) / std::sqrt(M_PI);
    worst = std::max(worst, std::fabs(std::norm(carrier->values()[m]) - exact));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("small grids use the direct node evaluation") {
  // n < 32 goes through the oscillatory path; compare against a larger FFT run
  const QuantumState tiny = sampled_gaussian(1.0, 0.0, 0.0, -7.0, 7.0, 24);
  const MomentumState mom = to_momentum(tiny, {false, 1e-14, 32});
  const auto carrier = mom.grid();
  REQUIRE(carrier->size() == 24);
  for (std::size_t m = 0; m < carrier->size(); ++m) {
    const double p = carrier->min_coord() + carrier->step() * double(m);
    const std::complex<double> direct = momentum_amplitude_at(tiny, p);
    CHECK(std::abs(carrier->values()[m] - direct) < 1e-12);
  }
}

TEST_CASE("momentum-side binning matches the erf oracle through the fft") {
  // sigma = 1, hbar = 1: momentum density has the same closed form as the
  // position density, so the same erf bin masses apply. Accuracy between
  // momentum nodes is interpolation limited at O(dp^4); dp = 2 pi / 64 here,
  // so the masses carry a few 1e-7 and the entropy a few 1e-6.
  const QuantumState grid = sampled_gaussian(1.0, 0.0, 0.0, -32.0, 32.0, 8192);
  const Density rho_p = to_momentum(grid).density();
  const auto dist =
      bin_probabilities(rho_p, BinGrid::full_line(0.8, BinConvention::midpoint));
  for (long k = dist.k_min; k <= dist.k_max(); ++k) {
    const double exact =
        0.5 * (std::erf((k + 0.5) * 0.8) - std::erf((k - 0.5) * 0.8));
    CHECK(dist.prob(k) == Approx(exact).margin(5e-6));
  }
  const double h = discrete_entropy(dist).value;
  double h_exact = 0.0;
  for (long k = -40; k <= 40; ++k) {
    const double q = 0.5 * (std::erf((k + 0.5) * 0.8) - std::erf((k - 0.5) * 0.8));
    if (q > 0.0) h_exact -= q * std::log(q);
  }
  CHECK(h == Approx(h_exact).margin(1e-4));
}

TEST_CASE("momentum amplitude agrees between closed form and grid") {
  const QuantumState analytic = make_gaussian(1.0, 0.5, 0.8);
  const QuantumState grid = sampled_gaussian(1.0, 0.5, 0.8, -13.0, 13.0, 4096);
  for (double p : {-2.0, -0.3, 0.0, 0.8, 1.9}) {
    const auto a = momentum_amplitude_at(analytic, p);
    const auto g = momentum_amplitude_at(grid, p);
    CHECK(std::abs(a - g) < 1e-7);
  }
}
