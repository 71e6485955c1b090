#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "fracspec/cli.hpp"
#include "fracspec/counterexample.hpp"
#include "fracspec/errors.hpp"
#include "fracspec/mlf.hpp"
#include "fracspec/solver.hpp"

namespace fracspec::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json index_json(const MultiIndex& n) { return json(n.n); }

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory '" + dir + "' is not writable");
  }
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  f.close();
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

// Flags shared by solve and residual; unset values keep the config's.
struct RunFlags {
  std::string config;
  bool strict = false;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<std::int64_t> truncation;
  std::optional<std::size_t> grid;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--config", f.config, "JSON run configuration")->required();
  sub->add_flag("--strict", f.strict, "enforce the regularity hypothesis (exit 3 on failure)");
  sub->add_option("--workers", f.workers, "worker threads (fallback: FRACSPEC_WORKERS)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--dt", f.dt, "output / residual time step")->check(CLI::PositiveNumber);
  sub->add_option("--truncation", f.truncation, "modes with |n|^2 below this value")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid", f.grid, "grid points per axis (odd)")->check(CLI::PositiveNumber);
}

std::optional<std::size_t> env_workers() {
  const char* v = std::getenv("FRACSPEC_WORKERS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("FRACSPEC_WORKERS must be a positive integer");
  return static_cast<std::size_t>(n);
}

RunConfig load_run_config(const RunFlags& f, std::size_t default_steps) {
  RunConfig c = parse_config(read_json_file(f.config));
  if (f.strict) c.strict = true;
  if (f.workers) {
    c.workers = *f.workers;
  } else if (const auto w = env_workers()) {
    c.workers = *w;
  }
  if (f.out) c.output_dir = *f.out;
  if (f.dt) c.dt = *f.dt;
  if (f.truncation) c.truncation_radius_sq = *f.truncation;
  if (f.grid) c.grid_M = *f.grid;
  resolve(c, default_steps);
  return c;
}

std::size_t step_count(const RunConfig& c) {
  return static_cast<std::size_t>(std::llround(c.T / c.dt));
}

json regularity_json(const RegularityCheck& rc) {
  return {{"a", rc.a},
          {"exponent_ok", rc.exponent_ok},
          {"phi_tail_ok", rc.phi_tail_ok},
          {"source_tail_ok", rc.source_tail_ok},
          {"passed", rc.passed()},
          {"messages", rc.messages}};
}

json quadrature_json(const SolutionField& sol) {
  json modes = json::array();
  for (const auto& m : sol.modes()) {
    modes.push_back({{"n", index_json(m.index)},
                     {"lambda", m.solution.lambda},
                     {"error_est", m.solution.quadrature_error_est},
                     {"mesh_M", m.solution.mesh_M}});
  }
  return {{"max_error_est", sol.max_quadrature_error()}, {"modes", std::move(modes)}};
}

int cmd_mlf(double rho, double mu, const std::vector<double>& ts,
            const std::optional<std::string>& out_dir, std::ostream& out) {
  MittagLeffler ml(rho, mu);  // DomainError on invalid parameters
  std::string table = "t,value,est_rel_error,branch\n";
  for (const double t : ts) {
    const EvalReport r = ml.eval_neg(t);
    table += fmt(t) + "," + fmt(r.value) + "," + fmt(r.est_rel_error) + "," + to_string(r.branch) + "\n";
  }
  out << table;
  if (out_dir) write_file(prepare_dir(*out_dir) / "mlf.csv", table);
  return kExitOk;
}

int cmd_solve(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig c = load_run_config(flags, 10);
  const auto dir = prepare_dir(c.output_dir);
  const ProblemSpec spec = c.problem();
  const std::vector<double> times = uniform_times(c.T, step_count(c));
  const SolutionField sol = solve(spec, times, c.truncation_radius_sq, c.grid_M, c.solve_options());
  for (const auto& w : sol.warnings) err << "warning: " << w << "\n";

  std::string csv;
  for (std::size_t a = 0; a < c.dim; ++a) csv += "x_" + std::to_string(a + 1) + ",";
  csv += "t,re_u,im_u\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    const GridField g = sol.render(i);
    for (std::size_t p = 0; p < g.size(); ++p) {
      for (const double x : g.point(p)) csv += fmt(x) + ",";
      csv += fmt(times[i]) + "," + fmt(g[p].real()) + "," + fmt(g[p].imag()) + "\n";
    }
  }
  write_file(dir / "solution.csv", csv);

  const double a = c.regularity_exponent;
  const json diag = {
      {"command", "solve"},
      {"config", to_json(c)},
      {"mode_count", sol.modes().size()},
      {"regularity", regularity_json(sol.regularity)},
      {"warnings", sol.warnings},
      {"quadrature", quadrature_json(sol)},
      {"tail_indicators",
       {{"a", a},
        {"at_T", truncation_tail(spec, a, c.truncation_radius_sq, c.T)},
        {"at_half_T", truncation_tail(spec, a, c.truncation_radius_sq, c.T / 2)}}},
  };
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
  out << "wrote " << (dir / "solution.csv").string() << " and " << (dir / "diagnostics.json").string()
      << "\n";
  return kExitOk;
}

int cmd_residual(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig c = load_run_config(flags, 256);
  const auto dir = prepare_dir(c.output_dir);
  const ProblemSpec spec = c.problem();
  const std::vector<double> times = uniform_times(c.T, 2 * step_count(c));
  const SolutionField sol = solve(spec, times, c.truncation_radius_sq, c.grid_M, c.solve_options());
  for (const auto& w : sol.warnings) err << "warning: " << w << "\n";
  const ResidualReport coarse = residual(sol, spec, c.dt);
  const ResidualReport fine = residual(sol, spec, c.dt / 2);

  const bool exact = coarse.sup_residual == 0.0 && fine.sup_residual == 0.0;
  const double rate = exact ? std::numeric_limits<double>::infinity()
                            : std::log2(coarse.sup_residual / fine.sup_residual);
  const json report = {
      {"command", "residual"},
      {"config", to_json(c)},
      {"dt", {c.dt, c.dt / 2}},
      {"sup_residual", {coarse.sup_residual, fine.sup_residual}},
      {"initial_layer_residual", {coarse.initial_layer_residual, fine.initial_layer_residual}},
      {"observed_rate", finite_or_null(rate)},
      {"exact", exact},
      {"initial_error", fine.initial_error},
      {"truncation_radius_sq", fine.truncation_radius_sq},
      {"tail_norm_estimates", fine.tail_norm_estimates},
      {"per_mode_worst", index_json(fine.per_mode_worst)},
      {"quadrature_max_error_est", sol.max_quadrature_error()},
      {"regularity", regularity_json(sol.regularity)},
  };
  write_file(dir / "residual.json", report.dump(2) + "\n");
  out << "sup residual " << fmt(coarse.sup_residual) << " (dt) -> " << fmt(fine.sup_residual)
      << " (dt/2), rate " << (exact ? std::string("exact") : fmt(rate)) << "\n";
  if (exact) return kExitOk;
  if (!(fine.sup_residual < coarse.sup_residual)) {
    err << "error: residual did not decrease under dt halving\n";
    return kExitConvergence;
  }
  if (rate < 0.8) {
    err << "error: observed residual rate " << fmt(rate) << " below 0.8\n";
    return kExitConvergence;
  }
  return kExitOk;
}

int cmd_counterexample(double rho, double t, std::int64_t k_max, std::int64_t k0,
                       const std::string& out_dir, std::ostream& out, std::ostream& err) {
  if (k_max < 2) throw ConfigError("--kmax must be >= 2");
  const HLDatum datum = hl_coefficients(k_max);
  // 21 log-spaced checkpoints over the last two decades up to k_max.
  std::vector<std::int64_t> checkpoints;
  const std::int64_t lo = std::max<std::int64_t>(k0, k_max / 100);
  if (lo >= k_max) throw ConfigError("--kmax must exceed --k0 for a growth fit");
  for (int i = 0; i <= 20; ++i) {
    const double k = static_cast<double>(lo) * std::pow(static_cast<double>(k_max) / lo, i / 20.0);
    const auto ki = std::clamp<std::int64_t>(std::llround(k), lo, k_max);
    if (checkpoints.empty() || ki > checkpoints.back()) checkpoints.push_back(ki);
  }
  const GrowthFit fit = divergence_sum(datum, rho, t, k0, checkpoints);

  const auto dir = prepare_dir(out_dir);
  std::string csv = "k,U\n";
  for (std::size_t i = 0; i < fit.k.size(); ++i) csv += std::to_string(fit.k[i]) + "," + fmt(fit.U[i]) + "\n";
  write_file(dir / "growth.csv", csv);
  const json j = {
      {"command", "counterexample"},
      {"config", {{"rho", rho}, {"t", t}, {"k_max", k_max}, {"k0", k0}}},
      {"k", fit.k},
      {"U", fit.U},
      {"fitted_slope", fit.fitted_slope},
      {"intercept", fit.intercept},
      {"predicted_slope", fit.predicted_slope},
      {"relative_slope_error", fit.relative_slope_error},
  };
  write_file(dir / "growth_fit.json", j.dump(2) + "\n");
  out << "fitted slope " << fmt(fit.fitted_slope) << ", predicted " << fmt(fit.predicted_slope)
      << ", relative error " << fmt(fit.relative_slope_error) << "\n";
  if (!(fit.relative_slope_error <= 0.1)) {
    err << "error: fitted slope deviates more than 10% from the prediction\n";
    return kExitConvergence;
  }
  return kExitOk;
}

SpectralField read_coefficients(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open coefficient file '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("coefficient file '" + path + "' has no header row");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3) throw ConfigError("coefficient header needs N index columns then re, im");
  const std::size_t dim = columns - 2;
  std::vector<SpectralField::Entry> entries;
  std::int64_t max_sq = 0;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) {
      throw ConfigError("coefficient row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(columns));
    }
    std::vector<std::int64_t> idx(dim);
    double re = 0.0;
    double im = 0.0;
    try {
      for (std::size_t a = 0; a < dim; ++a) {
        std::size_t used = 0;
        idx[a] = std::stoll(cells[a], &used);
        if (cells[a].find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("index");
      }
      std::size_t used = 0;
      re = std::stod(cells[dim], &used);
      if (cells[dim].find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("re");
      im = std::stod(cells[dim + 1], &used);
      if (cells[dim + 1].find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("im");
    } catch (const std::exception&) {
      throw ConfigError("malformed number in coefficient row " + std::to_string(row));
    }
    MultiIndex n(std::move(idx));
    max_sq = std::max(max_sq, n.norm_sq());
    entries.push_back({std::move(n), Complex(re, im)});
  }
  return SpectralField::from_entries(dim, max_sq + 1, std::move(entries));
}

int cmd_norm(const std::string& path, const std::vector<double>& a_list,
             const std::vector<double>& a_grid, std::ostream& out) {
  const SpectralField c = read_coefficients(path);
  std::string table = "a,norm_sq\n";
  for (const double a : a_list) table += fmt(a) + "," + fmt(liouville_norm_sq(c, a)) + "\n";

  std::int64_t max_sq = 0;
  for (const auto& e : c.entries()) max_sq = std::max(max_sq, e.index.norm_sq());
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(max_sq)));
  while (r * r > max_sq) --r;
  std::string critical;
  if (c.empty()) {
    critical = "inf";
  } else if (r < 8) {
    critical = "insufficient_data";
  } else {
    const std::vector<std::int64_t> checkpoints =
        r >= 1000 ? std::vector<std::int64_t>{r / 100, r / 10, r} : std::vector<std::int64_t>{r / 4, r / 2, r};
    try {
      const double crit = critical_exponent(c, a_grid, checkpoints);
      critical = std::isfinite(crit) ? fmt(crit) : "inf";
    } catch (const InconclusiveError&) {
      critical = "inconclusive";
    }
  }
  table += "critical_exponent," + critical + "\n";
  out << table;
  return kExitOk;
}

std::vector<double> default_a_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 16; ++i) g.push_back(0.25 * i);
  return g;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral solver for time-fractional subdiffusion on the torus"};
  app.name("fracspec");
  app.require_subcommand(1);

  double mlf_rho = 0.0;
  double mlf_mu = 1.0;
  std::vector<double> mlf_t;
  std::optional<std::string> mlf_out;
  auto* mlf = app.add_subcommand("mlf", "tabulate E_{rho,mu}(-t)");
  mlf->add_option("--rho", mlf_rho, "order rho in (0, 2]")->required();
  mlf->add_option("--mu", mlf_mu, "second parameter mu > 0");
  mlf->add_option("--t", mlf_t, "comma-separated t >= 0")->required()->delimiter(',');
  mlf->add_option("--out", mlf_out, "also write mlf.csv into this directory");

  RunFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "solve a configured problem, write CSV and JSON");
  add_run_flags(solve_cmd, solve_flags);

  RunFlags residual_flags;
  auto* residual_cmd = app.add_subcommand("residual", "equation residual at dt and dt/2");
  add_run_flags(residual_cmd, residual_flags);

  double ce_rho = 0.5;
  double ce_t = 1.0;
  std::int64_t ce_kmax = 100000;
  std::int64_t ce_k0 = 8;
  std::string ce_out = ".";
  auto* ce = app.add_subcommand("counterexample", "divergence growth law for the Hardy-Littlewood datum");
  ce->add_option("--rho", ce_rho, "order rho in (0, 1)")->required();
  ce->add_option("--t", ce_t, "time t > 0")->required();
  ce->add_option("--kmax", ce_kmax, "largest mode");
  ce->add_option("--k0", ce_k0, "first mode of the sum");
  ce->add_option("--out", ce_out, "output directory");

  std::string norm_file;
  std::vector<double> norm_a = {0.0, 0.5, 1.0};
  std::vector<double> norm_grid = default_a_grid();
  auto* norm = app.add_subcommand("norm", "Liouville norms and critical exponent of a coefficient file");
  norm->add_option("--coeffs", norm_file, "CSV: header, then n_1..n_N,re,im rows")->required();
  norm->add_option("--a", norm_a, "comma-separated exponents")->delimiter(',');
  norm->add_option("--a-grid", norm_grid, "ascending trial exponents for the critical search")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (mlf->parsed()) return cmd_mlf(mlf_rho, mlf_mu, mlf_t, mlf_out, out);
    if (solve_cmd->parsed()) return cmd_solve(solve_flags, out, err);
    if (residual_cmd->parsed()) return cmd_residual(residual_flags, out, err);
    if (ce->parsed()) return cmd_counterexample(ce_rho, ce_t, ce_kmax, ce_k0, ce_out, out, err);
    if (norm->parsed()) return cmd_norm(norm_file, norm_a, norm_grid, out);
  } catch (const RegularityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRegularity;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const AccuracyError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fracspec::cli
