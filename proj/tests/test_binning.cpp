#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "egrain/binning.hpp"
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

}  // namespace

TEST_CASE("central bin mass equals erf(1/2)") {
  const auto dist = bin_probabilities(gaussian_density(1.0, 0.0),
                                      BinGrid::full_line(1.0, -0.5));
  CHECK(dist.prob(0) == Approx(std::erf(0.5)).epsilon(1e-12));
  CHECK(dist.prob(0) == Approx(0.520500).margin(5e-7));
}

TEST_CASE("large-bin border grid splits a symmetric state in half") {
  const auto dist = bin_probabilities(gaussian_density(1.0, 0.0),
                                      BinGrid::full_line(100.0, 0.0));
  CHECK(dist.prob(0) == Approx(0.5).margin(1e-12));
  CHECK(dist.prob(-1) == Approx(0.5).margin(1e-12));
}

TEST_CASE("large-bin midpoint finite window swallows all mass") {
  const auto dist = bin_probabilities(gaussian_density(1.0, 0.0),
                                      BinGrid::finite(100.0, 0));
  REQUIRE(dist.size() == 1);
  CHECK(dist.prob(0) == Approx(1.0).margin(1e-12));
  CHECK(dist.tail_mass == Approx(0.0).margin(1e-12));
}

TEST_CASE("finite windows return exactly 2M+1 bins and a direct tail") {
  const auto dist =
      bin_probabilities(gaussian_density(1.0, 0.0), BinGrid::finite(1.0, 3));
  REQUIRE(dist.size() == 7);
  CHECK(dist.k_min == -3);
  CHECK(dist.finite_window);
  for (long k = -3; k <= 3; ++k)
    CHECK(dist.prob(k) == Approx(oracles::gaussian_bin(1.0, 0.0, 1.0, k)).epsilon(1e-11));
  CHECK(dist.tail_mass ==
        Approx(oracles::gaussian_tail_mass(1.0, 3.5)).epsilon(1e-9));
  CHECK(dist.covered_mass + dist.tail_mass == Approx(1.0).margin(1e-10));
}

TEST_CASE("mass conservation across grids") {
  const Density rho = gaussian_density(0.8, 0.35);
  for (double delta : {0.25, 1.0, 3.0}) {
    for (double xi0 : {0.0, -0.5 * delta, 0.17}) {
      const auto dist = bin_probabilities(rho, BinGrid::full_line(delta, xi0));
      CHECK(dist.covered_mass + dist.tail_mass == Approx(1.0).margin(1e-10));
      CHECK(dist.tail_mass < kTruncationEps);
      for (double p : dist.probs) CHECK(p >= 0.0);
    }
  }
}

TEST_CASE("refinement: halving delta and re-aggregating reproduces bins") {
  const Density rho = gaussian_density(1.0, 0.2);
  const double delta = 0.8;
  const double xi0 = 0.1;
  const auto coarse = bin_probabilities(rho, BinGrid::full_line(delta, xi0));
  const auto fine = bin_probabilities(rho, BinGrid::full_line(0.5 * delta, xi0));
  // coarse bin k = [xi0 + k d, xi0 + (k+1) d] = fine bins 2k and 2k+1
  for (long k = coarse.k_min; k <= coarse.k_max(); ++k) {
    const double agg = fine.prob(2 * k) + fine.prob(2 * k + 1);
    CHECK(agg == Approx(coarse.prob(k)).margin(1e-12));
  }
}

TEST_CASE("border and midpoint conventions differ for a displaced state") {
  const Density rho = gaussian_density(1.0, 0.3);
  auto border = bin_probabilities(rho, BinGrid::full_line(1.0, BinConvention::border));
  auto midpoint =
      bin_probabilities(rho, BinGrid::full_line(1.0, BinConvention::midpoint));
  std::sort(border.probs.begin(), border.probs.end(), std::greater<>());
  std::sort(midpoint.probs.begin(), midpoint.probs.end(), std::greater<>());
  double diff = 0.0;
  for (std::size_t i = 0; i < std::min(border.size(), midpoint.size()); ++i)
    diff = std::max(diff, std::fabs(border.probs[i] - midpoint.probs[i]));
  CHECK(diff > 1e-3);
}

TEST_CASE("tail second moment: vanishing, gaussian oracle, uniform") {
  const Density rho = gaussian_density(1.0, 0.0);
  CHECK(tail_second_moment(rho, BinGrid::finite(1.0, 20)) == 0.0);

  const double expected = oracles::gaussian_tail_x2(1.0, 0.5);
  CHECK(tail_second_moment(rho, BinGrid::finite(1.0, 0)) ==
        Approx(expected).epsilon(1e-10));

  const Density uni = uniform_density(-1.0, 1.0);
  CHECK(tail_second_moment(uni, BinGrid::finite(1.0, 0)) ==
        Approx(7.0 / 24.0).epsilon(1e-11));
}

TEST_CASE("tail variance: symmetric equality, displaced inequality, degenerate") {
  const Density sym = gaussian_density(1.0, 0.0);
  const BinGrid grid = BinGrid::finite(1.0, 0);
  const auto var_sym = tail_variance(sym, grid);
  REQUIRE(var_sym.has_value());
  const double q = oracles::gaussian_tail_mass(1.0, 0.5);
  CHECK(*var_sym == Approx(oracles::gaussian_tail_x2(1.0, 0.5) / q).epsilon(1e-9));

  const Density displaced = gaussian_density(1.0, 0.3);
  const auto var_d = tail_variance(displaced, grid);
  REQUIRE(var_d.has_value());
  const double qd = density_moment(displaced, 0, Domain::outside(0.5));
  const double x2d = tail_second_moment(displaced, grid);
  CHECK(*var_d < x2d / qd);

  CHECK_FALSE(tail_variance(sym, BinGrid::finite(1.0, 30)).has_value());
}

TEST_CASE("second-moment bound on the tail variance for near-centered states") {
  // sigma^2(Omega) <= <x^2>_M / q_inf whenever <x> is near 0
  for (double x0 : {0.0, 0.05, -0.08}) {
    const Density rho = gaussian_density(1.0, x0);
    for (int m : {0, 1, 2}) {
      const BinGrid grid = BinGrid::finite(0.9, m);
      const auto var = tail_variance(rho, grid);
      if (!var) continue;
      const double q = density_moment(rho, 0, Domain::outside(grid.window_half_width()));
      const double x2 = tail_second_moment(rho, grid);
      CHECK(*var <= x2 / q + 1e-12);
    }
  }
}

TEST_CASE("finite window rejects negative M; full line rejects bad delta") {
  CHECK_THROWS_AS(BinGrid::finite(1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(BinGrid::full_line(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BinGrid::full_line(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("unnormalized density trips the truncation error") {
  // mass 0.5 on a finite support: the full-line expansion can never cover 1
  Density half([](double x) { return (x >= 0.0 && x <= 1.0) ? 0.5 : 0.0; }, 0.5,
               1.0, Interval{0.0, 1.0});
  CHECK_THROWS_AS(bin_probabilities(half, BinGrid::full_line(0.25, 0.0)),
                  truncation_error);
  try {
    bin_probabilities(half, BinGrid::full_line(0.25, 0.0));
  } catch (const truncation_error& e) {
    CHECK(e.achieved_tail() == Approx(0.5).margin(1e-9));
  }
}

TEST_CASE("csv export carries edges and probabilities") {
  const auto dist =
      bin_probabilities(gaussian_density(1.0, 0.0), BinGrid::finite(1.0, 1));
  std::ostringstream os;
  dist.write_csv(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "k,lower_edge,upper_edge,prob");
  long k;
  char comma;
  double lo, hi, p;
  int rows = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    row >> k >> comma >> lo >> comma >> hi >> comma >> p;
    CHECK(hi - lo == Approx(1.0));
    CHECK(p == Approx(dist.prob(k)));
    ++rows;
  }
  CHECK(rows == 3);
}
