#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egrain/bounds.hpp"

namespace egrain {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One state family entry of a sweep: either analytic Gaussian parameters or
/// a grid file to import.
struct StateSpec {
  enum class Kind { gaussian, grid_file };
  Kind kind = Kind::gaussian;
  double sigma = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;
  std::string path;
  std::string label;

  QuantumState build(double hbar) const {
    if (kind == Kind::gaussian) return make_gaussian(sigma, x0, p0, hbar);
    return load_grid_state_file(path, hbar);
  }

  /// Parse "gaussian:sigma,x0,p0" or "grid:path".
  static StateSpec parse(const std::string& text) {
    StateSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest =
        colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (head == "gaussian") {
      double s = 1.0, x0 = 0.0, p0 = 0.0;
      if (std::sscanf(rest.c_str(), "%lf,%lf,%lf", &s, &x0, &p0) < 1)
        throw std::invalid_argument("StateSpec: expected gaussian:sigma,x0,p0");
      spec.kind = Kind::gaussian;
      spec.sigma = s;
      spec.x0 = x0;
      spec.p0 = p0;
      spec.label = text;
      return spec;
    }
    if (head == "grid") {
      if (rest.empty())
        throw std::invalid_argument("StateSpec: expected grid:path");
      spec.kind = Kind::grid_file;
      spec.path = rest;
      spec.label = text;
      return spec;
    }
    throw std::invalid_argument("StateSpec: unknown state kind '" + head + "'");
  }
};

struct SweepConfig {
  double hbar = 1.0;
  std::vector<StateSpec> states;
  std::vector<double> gammas;                 // dx = dp = sqrt(gamma*hbar)
  std::vector<double> dx_grid, dp_grid;       // cartesian product, if given
  std::vector<std::pair<int, int>> windows;   // (M, N); empty = full line only
  std::vector<BinConvention> conventions = {BinConvention::midpoint};
  std::string output_path;

  std::vector<Accuracies> accuracies() const {
    std::vector<Accuracies> out;
    for (double g : gammas) {
      if (!(g > 0.0)) throw std::invalid_argument("SweepConfig: gamma <= 0");
      const double d = std::sqrt(g * hbar);
      out.emplace_back(d, d, hbar);
    }
    for (double dx : dx_grid)
      for (double dp : dp_grid) out.emplace_back(dx, dp, hbar);
    if (out.empty())
      throw std::invalid_argument("SweepConfig: no accuracies specified");
    return out;
  }
};

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
  SweepConfig cfg;
  cfg.hbar = j.value("hbar", 1.0);
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
    throw std::invalid_argument("sweep config: nonempty 'states' array required");
  for (const auto& s : j["states"]) {
    if (s.is_string()) {
      cfg.states.push_back(StateSpec::parse(s.get<std::string>()));
      continue;
    }
    StateSpec spec;
    const std::string type = s.value("type", "gaussian");
    if (type == "gaussian") {
      spec.kind = StateSpec::Kind::gaussian;
      spec.sigma = s.value("sigma", 1.0);
      spec.x0 = s.value("x0", 0.0);
      spec.p0 = s.value("p0", 0.0);
      spec.label = s.value("label", "gaussian:" + format_g17(spec.sigma) + "," +
                                        format_g17(spec.x0) + "," +
                                        format_g17(spec.p0));
    } else if (type == "grid") {
      spec.kind = StateSpec::Kind::grid_file;
      spec.path = s.at("path").get<std::string>();
      spec.label = s.value("label", "grid:" + spec.path);
    } else {
      throw std::invalid_argument("sweep config: unknown state type " + type);
    }
    cfg.states.push_back(std::move(spec));
  }
  cfg.gammas = j.value("gammas", std::vector<double>{});
  cfg.dx_grid = j.value("dx", std::vector<double>{});
  cfg.dp_grid = j.value("dp", std::vector<double>{});
  if (j.contains("windows"))
    for (const auto& w : j["windows"])
      cfg.windows.emplace_back(w.at(0).get<int>(), w.at(1).get<int>());
  if (j.contains("conventions")) {
    cfg.conventions.clear();
    for (const auto& c : j["conventions"]) {
      const std::string name = c.get<std::string>();
      if (name == "midpoint")
        cfg.conventions.push_back(BinConvention::midpoint);
      else if (name == "border")
        cfg.conventions.push_back(BinConvention::border);
      else
        throw std::invalid_argument("sweep config: unknown convention " + name);
    }
    if (cfg.conventions.empty())
      throw std::invalid_argument("sweep config: empty conventions list");
  }
  cfg.output_path = j.value("out", std::string());
  return cfg;
}

/// Run every (state, convention, accuracy, window) combination. Points are
/// evaluated concurrently over immutable inputs; report order follows the
/// config regardless of completion order.
inline std::vector<BoundReport> run_verify(const SweepConfig& cfg,
                                           unsigned threads = 0) {
  struct Point {
    const QuantumState* state;
    ReportRequest req;
  };
  std::vector<QuantumState> states;
  states.reserve(cfg.states.size());
  for (const auto& spec : cfg.states) states.push_back(spec.build(cfg.hbar));

  const std::vector<Accuracies> accs = cfg.accuracies();
  std::vector<Point> points;
  for (std::size_t si = 0; si < states.size(); ++si)
    for (BinConvention conv : cfg.conventions)
      for (const Accuracies& acc : accs) {
        if (cfg.windows.empty()) {
          points.push_back(
              {&states[si], ReportRequest{acc, std::nullopt, conv,
                                          cfg.states[si].label}});
        } else {
          for (const auto& w : cfg.windows)
            points.push_back(
                {&states[si], ReportRequest{acc, w, conv, cfg.states[si].label}});
        }
      }

  std::vector<BoundReport> reports(points.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(points.size(), 1));
  if (threads <= 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      reports[i] = evaluate_bounds(*points[i].state, points[i].req);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= points.size()) return;
        reports[i] = evaluate_bounds(*points[i].state, points[i].req);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return reports;
}

/// 0 iff no verdict is violated and no module error occurred.
inline int exit_status(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (r.any_violation() || r.has_error()) return 1;
  return 0;
}

struct CrossoverResult {
  double gamma_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double residual = 0.0;
};

/// Root of bound_b(gamma) - bound_r(gamma) on [1, 20] by bisection to 1e-10.
/// The root must land in [7.16, 7.18]; anything else signals a spheroidal
/// regression.
inline CrossoverResult find_crossover(int min_terms = 0) {
  auto f = [min_terms](double gamma) {
    const Accuracies acc(std::sqrt(gamma), std::sqrt(gamma), 1.0);
    return bound_b(acc) - bound_r(acc, min_terms);
  };
  double lo = 1.0, hi = 20.0;
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo > 0.0) || !(fhi < 0.0))
    throw numeric_error("find_crossover: no sign change on [1, 20]",
                        std::min(std::fabs(flo), std::fabs(fhi)));
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm > 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  CrossoverResult out;
  out.gamma_star = 0.5 * (lo + hi);
  out.lo = lo;
  out.hi = hi;
  out.residual = f(out.gamma_star);
  if (out.gamma_star < 7.16 || out.gamma_star > 7.18)
    throw numeric_error("find_crossover: root outside [7.16, 7.18]",
                        out.residual);
  return out;
}

struct BoundCurveRow {
  double gamma;
  double b;
  double r;
};

/// (gamma, B, R) on a log-spaced grid, both bound curves side by side.
inline std::vector<BoundCurveRow> bound_curve(double gamma_lo, double gamma_hi,
                                              int n, int min_terms = 0) {
  if (!(gamma_lo > 0.0) || !(gamma_lo < gamma_hi))
    throw std::invalid_argument("bound_curve: need 0 < gamma_lo < gamma_hi");
  if (n < 2) throw std::invalid_argument("bound_curve: need n >= 2");
  std::vector<BoundCurveRow> rows;
  rows.reserve(std::size_t(n));
  const double ratio = std::log(gamma_hi / gamma_lo);
  for (int i = 0; i < n; ++i) {
    // endpoints pinned exactly so rounding cannot leave [gamma_lo, gamma_hi]
    const double gamma =
        i == 0 ? gamma_lo
               : (i == n - 1
                      ? gamma_hi
                      : gamma_lo * std::exp(ratio * double(i) / double(n - 1)));
    const Accuracies acc(std::sqrt(gamma), std::sqrt(gamma), 1.0);
    rows.push_back({gamma, bound_b(acc), bound_r(acc, min_terms)});
  }
  return rows;
}

inline void write_bound_curve_csv(std::ostream& os,
                                  const std::vector<BoundCurveRow>& rows) {
  os << "gamma,B,R\n";
  for (const auto& row : rows)
    os << format_g17(row.gamma) << ',' << format_g17(row.b) << ','
       << format_g17(row.r) << '\n';
}

inline void write_bound_curve_gnuplot(std::ostream& os,
                                      const std::string& csv_path) {
  os << "set datafile separator ','\n"
     << "set logscale x\n"
     << "set xlabel 'gamma = dx*dp/hbar'\n"
     << "set ylabel 'bound [nats]'\n"
     << "set key left bottom\n"
     << "plot '" << csv_path << "' using 1:2 with lines dt 2 lc rgb 'red' "
     << "title 'B', '" << csv_path << "' using 1:3 with lines lc rgb 'green' "
     << "title 'R'\n";
}

/// Write the CSV (plus a companion .gp plot script) row by row; a spheroidal
/// failure aborts with a partial-file marker and rethrows.
inline std::vector<BoundCurveRow> emit_bound_curve_files(
    const std::string& csv_path, double gamma_lo, double gamma_hi, int n) {
  if (!(gamma_lo > 0.0) || !(gamma_lo < gamma_hi))
    throw std::invalid_argument("bound_curve: need 0 < gamma_lo < gamma_hi");
  if (n < 2) throw std::invalid_argument("bound_curve: need n >= 2");
  std::ofstream csv(csv_path);
  if (!csv) throw std::invalid_argument("cannot open " + csv_path);
  csv << "gamma,B,R\n";
  std::vector<BoundCurveRow> rows;
  rows.reserve(std::size_t(n));
  const double ratio = std::log(gamma_hi / gamma_lo);
  for (int i = 0; i < n; ++i) {
    const double gamma =
        i == 0 ? gamma_lo
               : (i == n - 1
                      ? gamma_hi
                      : gamma_lo * std::exp(ratio * double(i) / double(n - 1)));
    const Accuracies acc(std::sqrt(gamma), std::sqrt(gamma), 1.0);
    try {
      const BoundCurveRow row{gamma, bound_b(acc), bound_r(acc)};
      rows.push_back(row);
      csv << format_g17(row.gamma) << ',' << format_g17(row.b) << ','
          << format_g17(row.r) << '\n';
    } catch (const std::exception& e) {
      csv << "# ABORTED: " << e.what() << '\n';
      csv.flush();
      throw;
    }
  }
  std::ofstream gp(csv_path + ".gp");
  write_bound_curve_gnuplot(gp, csv_path);
  return rows;
}

}  // namespace egrain
