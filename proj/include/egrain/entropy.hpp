#pragma once

#include <cmath>

#include "egrain/binning.hpp"
#include "egrain/density.hpp"
#include "egrain/states.hpp"

namespace egrain {

enum class EntropyKind { continuous, discrete_full, discrete_finite };

/// An entropy in nats. truncation_bound is an upper bound on the contribution
/// of bins omitted by the full-line truncation policy (diagnostic only; 0 for
/// finite windows, which measure exactly their 2M+1 bins).
struct EntropyValue {
  double value = 0.0;
  EntropyKind kind = EntropyKind::continuous;
  int window_m = -1;
  double truncation_bound = 0.0;
};

/// -sum p_k ln p_k with 0 ln 0 := 0 by explicit branch. Terms are summed in
/// ascending |k| so results are reproducible.
inline EntropyValue discrete_entropy(const DiscreteDistribution& dist) {
  double sum = 0.0, comp = 0.0;
  auto add = [&](long k) {
    const double p = dist.prob(k);
    if (p <= 0.0) return;
    const double y = -p * std::log(p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  const long dmax = std::max(std::labs(dist.k_min), std::labs(dist.k_max()));
  add(0);
  for (long d = 1; d <= dmax; ++d) {
    add(-d);
    add(d);
  }
  EntropyValue out;
  out.value = sum;
  if (dist.finite_window) {
    out.kind = EntropyKind::discrete_finite;
    out.window_m = dist.window_m;
  } else {
    out.kind = EntropyKind::discrete_full;
    const double tau = dist.tail_mass;
    if (tau > 0.0)
      out.truncation_bound =
          -tau * std::log(tau) +
          tau * std::log(double(std::max<std::size_t>(dist.size(), 2)));
  }
  return out;
}

/// -integral of rho ln rho over the domain, with the integrand defined as 0
/// wherever rho vanishes. Splits at the density's declared edges/zeros.
inline double continuous_entropy(const Density& rho, const Domain& domain,
                                 const QuadOptions& opt = default_quad_options()) {
  auto f = [&rho](double x) {
    const double r = rho(x);
    return r > 0.0 ? -r * std::log(r) : 0.0;
  };
  return integrate(f, rho.clip(domain), rho.hints(), opt);
}

/// Entropy of the position distribution binned at a (large) delta under the
/// given offset convention. For symmetric states this approaches ln 2 under
/// the border convention and 0 under the midpoint convention as delta grows.
inline EntropyValue large_delta_limit_probe(const QuantumState& state,
                                            BinConvention convention,
                                            double delta) {
  return discrete_entropy(
      bin_probabilities(state.position_density(), BinGrid::full_line(delta, convention)));
}

}  // namespace egrain
