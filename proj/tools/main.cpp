// Command-line front end: entropy / bounds / verify / crossover / fig2.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "egrain/egrain.hpp"

namespace {

using nlohmann::json;

int run_entropy(const std::string& state_text, double delta, double xi0,
                std::optional<int> window, double hbar,
                const std::string& dist_out) {
  const egrain::StateSpec spec = egrain::StateSpec::parse(state_text);
  const egrain::QuantumState state = spec.build(hbar);
  egrain::DiscreteDistribution dist;
  if (window) {
    if (std::fabs(xi0 + 0.5 * delta) > 1e-12 * delta) {
      std::cerr << "entropy: finite windows use the midpoint convention "
                   "(xi0 = -delta/2)\n";
      return 2;
    }
    dist = egrain::bin_probabilities(state, egrain::BinGrid::finite(delta, *window));
  } else {
    dist = egrain::bin_probabilities(state, egrain::BinGrid::full_line(delta, xi0));
  }
  const egrain::EntropyValue h = egrain::discrete_entropy(dist);
  json out;
  out["state"] = spec.label;
  out["delta"] = delta;
  out["xi0"] = window ? -0.5 * delta : xi0;
  out["window"] = window ? json(*window) : json(nullptr);
  out["entropy"] = h.value;
  out["kind"] = h.kind == egrain::EntropyKind::discrete_finite ? "discrete_finite"
                                                               : "discrete_full";
  out["covered_mass"] = dist.covered_mass;
  out["tail_mass"] = dist.tail_mass;
  out["truncation_bound"] = h.truncation_bound;
  std::cout << out.dump(2) << '\n';
  if (!dist_out.empty()) {
    std::ofstream os(dist_out);
    if (!os) {
      std::cerr << "entropy: cannot open " << dist_out << '\n';
      return 2;
    }
    dist.write_csv(os);
  }
  return 0;
}

int run_bounds(double dx, double dp, double hbar, std::optional<double> x2,
               std::optional<double> p2, std::optional<double> qx,
               std::optional<double> qp) {
  const egrain::Accuracies acc(dx, dp, hbar);
  json out;
  out["dx"] = dx;
  out["dp"] = dp;
  out["hbar"] = hbar;
  out["gamma"] = acc.gamma();
  out["bbm_rhs"] = egrain::bound_bbm(hbar);
  out["B"] = egrain::bound_b(acc);
  if (acc.gamma() <= 50.0) {
    out["R"] = egrain::bound_r(acc);
    out["max_BR"] = egrain::bound_max_br(acc);
  } else {
    out["R"] = nullptr;
    out["max_BR"] = nullptr;
  }
  if (x2 || p2 || qx || qp) {
    egrain::TailData tails;
    tails.x2_tail = x2.value_or(0.0);
    tails.p2_tail = p2.value_or(0.0);
    tails.qx_tail = qx.value_or(tails.x2_tail > 0.0 ? 1.0 : 0.0);
    tails.qp_tail = qp.value_or(tails.p2_tail > 0.0 ? 1.0 : 0.0);
    out["L"] = egrain::bound_l(acc, tails);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_verify(const std::string& config_path, const std::string& out_dir,
               unsigned threads) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "verify: cannot open config " << config_path << '\n';
    return 2;
  }
  json j;
  in >> j;
  egrain::SweepConfig cfg = egrain::parse_sweep_config(j);
  const std::vector<egrain::BoundReport> reports = egrain::run_verify(cfg, threads);

  std::filesystem::create_directories(out_dir);
  const std::string path =
      (std::filesystem::path(out_dir) / "reports.json").string();
  std::ofstream os(path);
  if (!os) {
    std::cerr << "verify: cannot open " << path << '\n';
    return 2;
  }
  egrain::write_reports_json(os, reports);

  for (const auto& r : reports) {
    std::cout << r.state_label << " gamma=" << egrain::format_g17(r.gamma);
    if (r.window_m)
      std::cout << " window=(" << *r.window_m << ',' << *r.window_n << ')';
    if (r.has_error())
      std::cout << " : ERROR (" << *r.error << ")";
    else
      std::cout << (r.any_violation() ? " : VIOLATED" : " : ok");
    std::cout << '\n';
  }
  std::cout << "wrote " << path << " (" << reports.size() << " reports)\n";
  return egrain::exit_status(reports);
}

int run_crossover() {
  const egrain::CrossoverResult res = egrain::find_crossover();
  json out;
  out["gamma_star"] = res.gamma_star;
  out["bracket"] = {res.lo, res.hi};
  out["residual"] = res.residual;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_fig2(double lo, double hi, int n, const std::string& out_path) {
  const auto rows = egrain::emit_bound_curve_files(out_path, lo, hi, n);
  std::cout << "wrote " << out_path << " (" << rows.size() << " rows) and "
            << out_path << ".gp\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-grained entropic uncertainty toolkit"};
  app.require_subcommand(1);

  double hbar = 1.0;

  auto* entropy = app.add_subcommand(
      "entropy", "binned Shannon entropy of one state on one grid");
  std::string state_text;
  double delta = 1.0, xi0 = 0.0;
  int window_m = -1;
  std::string dist_out;
  entropy->add_option("--state", state_text, "gaussian:sigma,x0,p0 or grid:path")
      ->required();
  entropy->add_option("--delta", delta, "bin width")->required();
  entropy->add_option("--xi0", xi0, "bin offset (full-line grids)");
  entropy->add_option("--window", window_m, "finite window M (midpoint bins)");
  entropy->add_option("--hbar", hbar, "hbar convention (default 1)");
  entropy->add_option("--dist-out", dist_out, "write bin CSV here");

  auto* bounds = app.add_subcommand("bounds", "evaluate the lower bounds");
  double dx = 1.0, dp = 1.0;
  double x2 = -1.0, p2 = -1.0, qx = -1.0, qp = -1.0;
  bounds->add_option("--dx", dx, "position accuracy")->required();
  bounds->add_option("--dp", dp, "momentum accuracy")->required();
  bounds->add_option("--hbar", hbar, "hbar convention (default 1)");
  bounds->add_option("--x2-tail", x2, "restricted <x^2> tail moment");
  bounds->add_option("--p2-tail", p2, "restricted <p^2> tail moment");
  bounds->add_option("--qx", qx, "position tail mass");
  bounds->add_option("--qp", qp, "momentum tail mass");

  auto* verify = app.add_subcommand("verify", "run a sweep from a JSON config");
  std::string config_path, out_dir = ".";
  unsigned threads = 0;
  verify->add_option("--config", config_path, "sweep config JSON")->required();
  verify->add_option("--out", out_dir, "output directory")->required();
  verify->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* crossover =
      app.add_subcommand("crossover", "locate the B/R crossover gamma*");

  auto* fig2 = app.add_subcommand(
      "fig2", "emit (gamma, B, R) bound-comparison data and a plot script");
  double gamma_lo = 0.5, gamma_hi = 20.0;
  int n = 100;
  std::string fig2_out;
  fig2->add_option("--gamma-lo", gamma_lo, "lower gamma")->required();
  fig2->add_option("--gamma-hi", gamma_hi, "upper gamma")->required();
  fig2->add_option("--n", n, "number of log-spaced rows")->required();
  fig2->add_option("--out", fig2_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (entropy->parsed()) {
      std::optional<int> w;
      if (entropy->count("--window")) w = window_m;
      if (entropy->count("--window") && !entropy->count("--xi0"))
        xi0 = -0.5 * delta;
      return run_entropy(state_text, delta, xi0, w, hbar, dist_out);
    }
    if (bounds->parsed()) {
      auto opt = [](double v) {
        return v >= 0.0 ? std::optional<double>(v) : std::nullopt;
      };
      return run_bounds(dx, dp, hbar, opt(x2), opt(p2), opt(qx), opt(qp));
    }
    if (verify->parsed()) return run_verify(config_path, out_dir, threads);
    if (crossover->parsed()) return run_crossover();
    if (fig2->parsed()) return run_fig2(gamma_lo, gamma_hi, n, fig2_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
