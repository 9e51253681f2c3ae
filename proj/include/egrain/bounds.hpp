#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egrain/binning.hpp"
#include "egrain/entropy.hpp"
#include "egrain/errors.hpp"
#include "egrain/fourier.hpp"
#include "egrain/specfun.hpp"
#include "egrain/states.hpp"

namespace egrain {

/// Absolute tolerance on inequality margins, one order above the quadrature
/// tolerance.
inline constexpr double kReportTol = 1e-9;

/// Detector accuracies delta-x, delta-p and the hbar convention; gamma is
/// the dimensionless product dx*dp/hbar.
struct Accuracies {
  double dx;
  double dp;
  HbarConvention hbar;

  Accuracies(double dx_, double dp_, double hbar_ = 1.0)
      : dx(dx_), dp(dp_), hbar{hbar_} {
    if (!(dx > 0.0) || !(dp > 0.0) || !(hbar_ > 0.0))
      throw std::domain_error("Accuracies: dx, dp, hbar must be positive");
  }
  double gamma() const { return dx * dp / hbar.hbar; }
};

/// Restricted tail moments feeding the finite-detector bound.
struct TailData {
  double x2_tail = 0.0;  // <x^2>_M
  double p2_tail = 0.0;  // <p^2>_N
  double qx_tail = 0.0;  // position tail mass
  double qp_tail = 0.0;  // momentum tail mass
};

/// 1 + ln(pi hbar): RHS of the continuous-entropy relation.
inline double bound_bbm(double hbar) {
  if (!(hbar > 0.0)) throw std::domain_error("bound_bbm: hbar must be positive");
  return 1.0 + std::log(std::numbers::pi * hbar);
}

/// (hbar/2) exp(S_x + S_p - 1 - ln(pi hbar)); at least hbar/2 whenever the
/// continuous-entropy relation holds for the inputs.
inline double strengthened_heisenberg_rhs(double sx_entropy, double sp_entropy,
                                          double hbar) {
  if (!(hbar > 0.0))
    throw std::domain_error("strengthened_heisenberg_rhs: hbar must be positive");
  return 0.5 * hbar *
         std::exp(sx_entropy + sp_entropy - 1.0 - std::log(std::numbers::pi * hbar));
}

/// -ln(gamma / (e pi)); negative once gamma > e*pi (then the coarse-grained
/// relation is trivially satisfied).
inline double bound_b(const Accuracies& acc) {
  return -std::log(acc.gamma() / (std::numbers::e * std::numbers::pi));
}

/// -2 ln( sqrt(gamma/2pi) R00(gamma/4, 1) ); positive for all supported
/// gamma. Domain limited to gamma <= 50 by the spheroidal range.
inline double bound_r(const Accuracies& acc, int min_terms = 0) {
  const double gamma = acc.gamma();
  if (gamma > 50.0 * (1.0 + 1e-12))
    throw std::domain_error("bound_r: gamma beyond supported range (<= 50)");
  const double r00 = radial_s1_at_one(0.25 * gamma, min_terms);
  return -2.0 * std::log(std::sqrt(gamma / (2.0 * std::numbers::pi)) * r00);
}

inline double bound_max_br(const Accuracies& acc, int min_terms = 0) {
  return std::max(bound_b(acc), bound_r(acc, min_terms));
}

/// R(eta, Lambda) = (eta/2) ln( delta^2 eta^3 / (2 pi e Lambda) ).
/// eta = 0 gives 0; Lambda = 0 with eta > 0 is the degenerate +inf case,
/// which callers must map to a zero-tail correction of 0.
inline double r_correction(double eta, double lambda, double delta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::domain_error("r_correction: eta must lie in [0, 1]");
  if (!(lambda >= 0.0))
    throw std::domain_error("r_correction: lambda must be nonnegative");
  if (!(delta > 0.0))
    throw std::domain_error("r_correction: delta must be positive");
  if (eta == 0.0) return 0.0;
  if (lambda == 0.0) return kInfinity;
  // log-sum form: eta^3 would underflow for tiny eta
  return 0.5 * eta *
         (2.0 * std::log(delta) + 3.0 * std::log(eta) -
          std::log(2.0 * std::numbers::pi * std::numbers::e * lambda));
}

/// Clipped minimizer of R(., Lambda): min{ (sqrt(2 pi Lambda)/(e delta))^{2/3}, 1 }.
inline double eta_min(double lambda, double delta) {
  if (!(lambda >= 0.0))
    throw std::domain_error("eta_min: lambda must be nonnegative");
  if (!(delta > 0.0)) throw std::domain_error("eta_min: delta must be positive");
  if (lambda == 0.0) return 0.0;
  const double v = std::pow(std::sqrt(2.0 * std::numbers::pi * lambda) /
                                (std::numbers::e * delta),
                            2.0 / 3.0);
  return std::min(v, 1.0);
}

/// The four-case state-dependent lower bound on H_M + H_N. Tail moments whose
/// mass is below the truncation threshold are treated as exactly zero, so
/// zero tails reduce case 1 to bound_b.
inline double bound_l(const Accuracies& acc, const TailData& tails) {
  const double x2 = tails.qx_tail <= kTruncationEps ? 0.0 : tails.x2_tail;
  const double p2 = tails.qp_tail <= kTruncationEps ? 0.0 : tails.p2_tail;
  const double e = std::numbers::e;
  const double pi = std::numbers::pi;
  const double hbar = acc.hbar.hbar;
  const double tx = (e * acc.dx) * (e * acc.dx) / (2.0 * pi);
  const double tp = (e * acc.dp) * (e * acc.dp) / (2.0 * pi);
  auto corr = [e, pi](double m2, double d) {
    return 3.0 * std::pow(std::sqrt(pi * m2) / (2.0 * e * d), 2.0 / 3.0);
  };
  if (x2 < tx && p2 < tp) return bound_b(acc) - corr(x2, acc.dx) - corr(p2, acc.dp);
  if (x2 < tx)
    return -corr(x2, acc.dx) -
           std::log(acc.dx * std::sqrt(2.0 * p2) / (std::sqrt(e * pi) * hbar));
  if (p2 < tp)
    return -corr(p2, acc.dp) -
           std::log(acc.dp * std::sqrt(2.0 * x2) / (std::sqrt(e * pi) * hbar));
  return -std::log(2.0 * std::sqrt(x2 * p2) / hbar);
}

/// H_M minus the Jensen lower bound, assembled as B_x + q_inf ln(dx) + the
/// tail integral of rho ln rho. Must be >= -kReportTol for normalized states.
inline double jensen_diagnostic(const Density& rho, double dx, int window_m,
                                const QuadOptions& opt = default_quad_options()) {
  if (!(dx > 0.0))
    throw std::domain_error("jensen_diagnostic: dx must be positive");
  if (window_m < 0)
    throw std::domain_error("jensen_diagnostic: window must be nonnegative");
  const BinGrid grid = BinGrid::finite(dx, window_m);
  const double h_m = discrete_entropy(bin_probabilities(rho, grid)).value;
  const double s_x = continuous_entropy(rho, Domain::full_line(), opt);
  const double b_x = -std::log(dx) + s_x;
  const Domain tail = Domain::outside(grid.window_half_width());
  const double q_inf = density_moment(rho, 0, tail, opt);
  const double tail_rho_ln_rho = -continuous_entropy(rho, tail, opt);
  const double rhs = b_x + q_inf * std::log(dx) + tail_rho_ln_rho;
  return h_m - rhs;
}

inline double jensen_diagnostic(const QuantumState& state, const Accuracies& acc,
                                int window_m,
                                const QuadOptions& opt = default_quad_options()) {
  return jensen_diagnostic(state.position_density(), acc.dx, window_m, opt);
}

/// lhs - rhs of the reversed logarithmic Sobolev inequality for a density f
/// normalized on the domain: integral of f ln f >= -0.5 ln(2 pi e var).
/// Gaussians on the full line saturate it.
inline double reversed_log_sobolev_check(const Density& f, const Domain& domain,
                                         const QuadOptions& opt = default_quad_options()) {
  const double lhs = -continuous_entropy(f, domain, opt);
  const double m1 = density_moment(f, 1, domain, opt);
  const double m2 = density_moment(f, 2, domain, opt);
  const double var = m2 - m1 * m1;
  // reject variances indistinguishable from zero at working precision
  const double var_floor = 100.0 * std::numeric_limits<double>::epsilon() *
                           std::max({m2, m1 * m1, 1e-300});
  if (!(var > var_floor))
    throw degenerate_error("reversed_log_sobolev_check: zero variance");
  const double rhs =
      -0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * var);
  return lhs - rhs;
}

// ---------------------------------------------------------------------------
// Bound reports

enum class Verdict { satisfied, violated, not_applicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    default: return "not-applicable";
  }
}

/// Everything computed for one (state, accuracy, window) triple: entropies,
/// bound values, margins (lhs - rhs) and per-inequality verdicts.
struct BoundReport {
  std::string state_label;
  double hbar = 1.0;
  double dx = 0.0;
  double dp = 0.0;
  double gamma = 0.0;
  BinConvention convention = BinConvention::midpoint;
  std::optional<int> window_m;
  std::optional<int> window_n;
  std::map<std::string, double> entropies;
  std::map<std::string, double> bounds;
  std::map<std::string, double> margins;
  std::map<std::string, Verdict> verdicts;
  std::vector<std::string> diagnostics;
  std::optional<std::string> error;

  bool any_violation() const {
    for (const auto& [name, v] : verdicts)
      if (v == Verdict::violated) return true;
    return false;
  }
  bool has_error() const { return error.has_value(); }
};

struct ReportRequest {
  Accuracies acc;
  std::optional<std::pair<int, int>> window;  // (M, N)
  BinConvention convention = BinConvention::midpoint;
  std::string label;
};

namespace detail {

inline void verdict_from_margin(BoundReport& rep, const std::string& name,
                                double margin) {
  rep.margins[name] = margin;
  rep.verdicts[name] =
      margin >= -kReportTol ? Verdict::satisfied : Verdict::violated;
}

}  // namespace detail

/// Evaluate every applicable inequality for one state at one accuracy pair.
/// Module errors are captured in the report (verdicts not-applicable) rather
/// than thrown, so sweeps can continue.
inline BoundReport evaluate_bounds(const QuantumState& state,
                                   const ReportRequest& req) {
  if (std::fabs(state.hbar() - req.acc.hbar.hbar) >
      1e-12 * req.acc.hbar.hbar)
    throw std::invalid_argument(
        "evaluate_bounds: state and accuracies use different hbar conventions");
  BoundReport rep;
  rep.state_label = req.label;
  rep.hbar = req.acc.hbar.hbar;
  rep.dx = req.acc.dx;
  rep.dp = req.acc.dp;
  rep.gamma = req.acc.gamma();
  rep.convention = req.convention;
  if (req.window) {
    rep.window_m = req.window->first;
    rep.window_n = req.window->second;
  }
  const char* const all_keys[] = {"bbm",     "heisenberg", "bound_b",
                                  "bound_r", "max_br",     "bound_l"};
  try {
    const MomentumState mom = to_momentum(state);
    const Density rho_x = state.position_density();
    const Density rho_p = mom.density();

    const double s_x = continuous_entropy(rho_x, Domain::full_line());
    const double s_p = continuous_entropy(rho_p, Domain::full_line());
    rep.entropies["S_x"] = s_x;
    rep.entropies["S_p"] = s_p;

    rep.bounds["bbm"] = bound_bbm(rep.hbar);
    detail::verdict_from_margin(rep, "bbm", s_x + s_p - rep.bounds["bbm"]);

    const double sigma_x = std::sqrt(state.variance_x());
    const double sigma_p = std::sqrt(mom.variance_p());
    rep.entropies["sigma_x"] = sigma_x;
    rep.entropies["sigma_p"] = sigma_p;
    rep.bounds["heisenberg"] = strengthened_heisenberg_rhs(s_x, s_p, rep.hbar);
    detail::verdict_from_margin(rep, "heisenberg",
                                sigma_x * sigma_p - rep.bounds["heisenberg"]);

    const double h_x =
        discrete_entropy(
            bin_probabilities(rho_x, BinGrid::full_line(rep.dx, req.convention)))
            .value;
    const double h_p =
        discrete_entropy(
            bin_probabilities(rho_p, BinGrid::full_line(rep.dp, req.convention)))
            .value;
    rep.entropies["H_x"] = h_x;
    rep.entropies["H_p"] = h_p;

    const double b = bound_b(req.acc);
    rep.bounds["bound_b"] = b;
    detail::verdict_from_margin(rep, "bound_b", h_x + h_p - b);
    if (b < 0.0)
      rep.diagnostics.push_back(
          "bound_b rhs is negative (gamma > e*pi): relation trivially satisfied");

    if (rep.gamma <= 50.0) {
      const double r = bound_r(req.acc);
      rep.bounds["bound_r"] = r;
      detail::verdict_from_margin(rep, "bound_r", h_x + h_p - r);
      rep.bounds["max_br"] = std::max(b, r);
      detail::verdict_from_margin(rep, "max_br", h_x + h_p - std::max(b, r));
    } else {
      rep.verdicts["bound_r"] = Verdict::not_applicable;
      rep.verdicts["max_br"] = Verdict::not_applicable;
      rep.diagnostics.push_back("bound_r skipped: gamma beyond supported range");
    }

    if (req.window) {
      const auto [m, n] = *req.window;
      const BinGrid grid_x = BinGrid::finite(rep.dx, m);
      const BinGrid grid_p = BinGrid::finite(rep.dp, n);
      const DiscreteDistribution dist_x = bin_probabilities(rho_x, grid_x);
      const DiscreteDistribution dist_p = bin_probabilities(rho_p, grid_p);
      const double h_m = discrete_entropy(dist_x).value;
      const double h_n = discrete_entropy(dist_p).value;
      rep.entropies["H_Mx"] = h_m;
      rep.entropies["H_Np"] = h_n;

      TailData tails;
      tails.qx_tail = dist_x.tail_mass;
      tails.qp_tail = dist_p.tail_mass;
      tails.x2_tail = tail_second_moment(rho_x, grid_x);
      tails.p2_tail = tail_second_moment(rho_p, grid_p);
      const double l = bound_l(req.acc, tails);
      rep.bounds["bound_l"] = l;

      // The finite-detector bound assumes near-zero centroids; refuse to
      // claim validity otherwise and let the caller re-center.
      const double mean_x = density_moment(rho_x, 1, Domain::full_line());
      const double mean_p = density_moment(rho_p, 1, Domain::full_line());
      const bool centered =
          std::fabs(mean_x) <= grid_x.window_half_width() / 10.0 &&
          std::fabs(mean_p) <= grid_p.window_half_width() / 10.0;
      rep.margins["bound_l"] = h_m + h_n - l;
      if (!centered) {
        rep.verdicts["bound_l"] = Verdict::not_applicable;
        rep.diagnostics.push_back(
            "bound_l not applicable: state centroid is large relative to the "
            "detector window; re-center the state");
      } else {
        rep.verdicts["bound_l"] = rep.margins["bound_l"] >= -kReportTol
                                      ? Verdict::satisfied
                                      : Verdict::violated;
      }
    }
  } catch (const resolution_error& e) {
    rep.error = e.what();
    rep.diagnostics.push_back(
        "resolution: " + std::string(e.what()) +
        " (max faithful |p| = " + std::to_string(e.max_faithful_momentum()) + ")");
    for (const char* k : all_keys)
      if (!rep.verdicts.count(k)) rep.verdicts[k] = Verdict::not_applicable;
  } catch (const numeric_error& e) {
    rep.error = e.what();
    for (const char* k : all_keys)
      if (!rep.verdicts.count(k)) rep.verdicts[k] = Verdict::not_applicable;
  } catch (const truncation_error& e) {
    rep.error = e.what();
    for (const char* k : all_keys)
      if (!rep.verdicts.count(k)) rep.verdicts[k] = Verdict::not_applicable;
  }
  return rep;
}

inline nlohmann::json report_to_json(const BoundReport& rep) {
  nlohmann::json j;
  j["state"] = rep.state_label;
  j["hbar"] = rep.hbar;
  j["dx"] = rep.dx;
  j["dp"] = rep.dp;
  j["gamma"] = rep.gamma;
  j["convention"] =
      rep.convention == BinConvention::midpoint ? "midpoint" : "border";
  if (rep.window_m)
    j["window"] = {{"m", *rep.window_m}, {"n", *rep.window_n}};
  else
    j["window"] = nullptr;
  j["entropies"] = rep.entropies;
  j["bounds"] = rep.bounds;
  j["margins"] = rep.margins;
  nlohmann::json verdicts;
  for (const auto& [name, v] : rep.verdicts) verdicts[name] = to_string(v);
  j["verdicts"] = verdicts;
  j["diagnostics"] = rep.diagnostics;
  j["error"] = rep.error ? nlohmann::json(*rep.error) : nlohmann::json(nullptr);
  return j;
}

inline void write_reports_json(std::ostream& os,
                               const std::vector<BoundReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  os << arr.dump(2) << '\n';
}

}  // namespace egrain
