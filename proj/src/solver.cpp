#include "fracspec/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::size_t data_dim(const FieldData& d) {
  return std::visit([](const auto& f) { return f.dim(); }, d);
}

}  // namespace

void ProblemSpec::validate() const {
  if (dim < 1) throw DomainError("problem dimension must be at least 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("order rho must lie in (0, 1]");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("final time T must be positive");
  if (!std::isfinite(regularity_exponent_a)) throw DomainError("regularity exponent must be finite");
  if (data_dim(phi) != dim) throw DomainError("initial datum dimension does not match the problem");
  for (const auto& s : source) {
    if (data_dim(s.g) != dim) throw DomainError("source term dimension does not match the problem");
  }
}

SpectralField coefficients_of(const FieldData& d) {
  if (const auto* c = std::get_if<SpectralField>(&d)) return *c;
  const auto& g = std::get<GridField>(d);
  const auto r = static_cast<std::int64_t>((g.points_per_axis() - 1) / 2);
  return analyze(g, r * r + 1);
}

namespace {

bool tail_stabilizes(const SpectralField& c, double a) {
  std::int64_t max_sq = 0;
  for (const auto& e : c.entries()) {
    if (e.value != 0.0) max_sq = std::max(max_sq, e.index.norm_sq());
  }
  const std::int64_t r = isqrt(max_sq);
  if (r < 8) return true;
  const std::int64_t radii[] = {r / 4, r / 2, r};
  const std::vector<double> sums = liouville_partial_sums(c, a, radii);
  return partial_sums_stabilize(sums);
}

// Coefficients of phi and of every g_i restricted to |n|^2 < k.
struct ModeData {
  std::vector<MultiIndex> indices;
  std::vector<Complex> phi;
  std::vector<std::vector<Complex>> weights;  // [term][mode]
};

SpectralField restricted(const FieldData& d, std::int64_t k) {
  if (const auto* c = std::get_if<SpectralField>(&d)) return c->truncated(k);
  return analyze(std::get<GridField>(d), k);
}

ModeData gather_modes(const ProblemSpec& spec, std::int64_t k) {
  ModeData md;
  md.indices = lattice_points(spec.dim, k);
  const SpectralField phi = restricted(spec.phi, k);
  md.phi.reserve(md.indices.size());
  for (const auto& n : md.indices) md.phi.push_back(phi.get(n));
  for (const auto& term : spec.source) {
    const SpectralField g = restricted(term.g, k);
    std::vector<Complex> w;
    w.reserve(md.indices.size());
    for (const auto& n : md.indices) w.push_back(term.q.is_zero() ? Complex(0.0) : g.get(n));
    md.weights.push_back(std::move(w));
  }
  return md;
}

ModeForcing forcing_for(const ProblemSpec& spec, const ModeData& md, std::size_t mode) {
  ModeForcing f;
  for (std::size_t i = 0; i < spec.source.size(); ++i) {
    const Complex w = md.weights[i][mode];
    if (w != 0.0) f.add(w, spec.source[i].q);
  }
  return f;
}

void check_uniform(std::span<const double> times, double& dt) {
  if (times.size() < 2 || times.front() != 0.0) {
    throw MeshError("time samples must start at 0 and contain at least two points");
  }
  dt = times.back() / static_cast<double>(times.size() - 1);
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::fabs(times[j] - static_cast<double>(j) * dt) > 1e-9 * dt) {
      throw MeshError("time samples are not uniformly spaced");
    }
  }
}

}  // namespace

RegularityCheck check_regularity(const ProblemSpec& spec) {
  RegularityCheck rc;
  rc.a = spec.regularity_exponent_a;
  const double half_dim = static_cast<double>(spec.dim) / 2.0;
  rc.exponent_ok = rc.a > half_dim;
  if (!rc.exponent_ok) {
    rc.messages.push_back("regularity exponent a = " + std::to_string(rc.a) +
                          " does not exceed N/2 = " + std::to_string(half_dim));
  }
  rc.phi_tail_ok = tail_stabilizes(coefficients_of(spec.phi), rc.a);
  if (!rc.phi_tail_ok) rc.messages.push_back("Liouville norm tail of phi does not stabilize");
  for (std::size_t i = 0; i < spec.source.size(); ++i) {
    if (!tail_stabilizes(coefficients_of(spec.source[i].g), rc.a)) {
      rc.source_tail_ok = false;
      rc.messages.push_back("Liouville norm tail of source term " + std::to_string(i) +
                            " does not stabilize");
    }
  }
  return rc;
}

SolutionField::SolutionField(std::size_t dim, double rho, double T,
                             std::int64_t truncation_radius_sq, std::size_t grid_M,
                             std::vector<double> times, std::vector<Mode> modes)
    : dim_(dim),
      rho_(rho),
      T_(T),
      truncation_(truncation_radius_sq),
      grid_M_(grid_M),
      times_(std::move(times)),
      modes_(std::move(modes)) {}

SpectralField SolutionField::snapshot(std::size_t time_index) const {
  if (time_index >= times_.size()) throw DomainError("time index out of range");
  std::vector<SpectralField::Entry> entries;
  entries.reserve(modes_.size());
  for (const auto& m : modes_) entries.push_back({m.index, m.solution.values[time_index]});
  SpectralField f = SpectralField::from_entries(dim_, truncation_, std::move(entries));
  f.set_real_valued(f.hermitian_defect() == 0.0);
  return f;
}

GridField SolutionField::render(std::size_t time_index, std::size_t points_per_axis) const {
  return synthesize(snapshot(time_index), points_per_axis == 0 ? grid_M_ : points_per_axis);
}

double SolutionField::max_quadrature_error() const {
  double e = 0.0;
  for (const auto& m : modes_) e = std::max(e, m.solution.quadrature_error_est);
  return e;
}

SolutionField solve(const ProblemSpec& spec, std::span<const double> times,
                    std::int64_t truncation_radius_sq, std::size_t grid_M,
                    const SolveOptions& options) {
  spec.validate();
  if (truncation_radius_sq < 1) throw DomainError("truncation radius must be at least 1");
  if (grid_M < 3 || grid_M % 2 == 0) throw DomainError("grid points per axis must be odd and >= 3");
  const std::int64_t box = isqrt(truncation_radius_sq - 1);
  if (box > static_cast<std::int64_t>((grid_M - 1) / 2)) {
    throw AliasError("truncation |n|^2 < " + std::to_string(truncation_radius_sq) +
                     " aliases on a grid of " + std::to_string(grid_M) + " points");
  }

  RegularityCheck rc = check_regularity(spec);
  std::vector<std::string> warnings;
  if (!rc.passed()) {
    std::string msg = "regularity hypothesis not met:";
    for (const auto& m : rc.messages) msg += " " + m + ";";
    if (options.strict) throw RegularityError(msg);
    warnings.push_back(msg);
  }

  const ModeData md = gather_modes(spec, truncation_radius_sq);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < md.indices.size(); ++i) {
    bool nonzero = md.phi[i] != 0.0;
    for (const auto& w : md.weights) nonzero = nonzero || w[i] != 0.0;
    if (nonzero) active.push_back(i);
  }

  GradedMesh mesh = GradedMesh::for_order(spec.rho, spec.T, options.mesh_M);
  if (options.mesh_r > 0.0) mesh.r = options.mesh_r;
  mesh.validate();

  std::vector<ModeSolution> results(active.size());
  std::vector<std::exception_ptr> errors(active.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= active.size()) return;
      const std::size_t i = active[j];
      try {
        const auto lambda = static_cast<double>(md.indices[i].norm_sq());
        results[j] = solve_mode(spec.rho, lambda, md.phi[i], forcing_for(spec, md, i), times, mesh,
                                options.modal);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(std::max<std::size_t>(options.workers, 1),
                                        std::max<std::size_t>(active.size(), 1));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // The lowest failing mode decides, independent of scheduling.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<SolutionField::Mode> modes;
  modes.reserve(active.size());
  for (std::size_t j = 0; j < active.size(); ++j) {
    modes.push_back({md.indices[active[j]], std::move(results[j])});
  }
  SolutionField sol(spec.dim, spec.rho, spec.T, truncation_radius_sq, grid_M,
                    std::vector<double>(times.begin(), times.end()), std::move(modes));
  sol.regularity = std::move(rc);
  sol.warnings = std::move(warnings);
  return sol;
}

SolutionField apply_termwise(const SolutionField& sol, Termwise which) {
  double dt = 0.0;
  if (which == Termwise::caputo) check_uniform(sol.times(), dt);
  std::vector<SolutionField::Mode> modes = sol.modes();
  for (auto& m : modes) {
    auto& v = m.solution.values;
    if (which == Termwise::A) {
      const auto lambda = static_cast<double>(m.index.norm_sq());
      for (auto& x : v) x *= lambda;
    } else {
      v = time_derivative_uniform(v, dt, sol.rho());
    }
  }
  SolutionField out(sol.dim(), sol.rho(), sol.T(), sol.truncation_radius_sq(), sol.grid_M(),
                    sol.times(), std::move(modes));
  out.regularity = sol.regularity;
  out.warnings = sol.warnings;
  return out;
}

ResidualReport residual(const SolutionField& sol, const ProblemSpec& spec, double dt) {
  spec.validate();
  if (spec.dim != sol.dim()) throw DomainError("solution and problem dimensions differ");
  double h = 0.0;
  check_uniform(sol.times(), h);
  const double ratio = dt / h;
  const double stride_d = std::round(ratio);
  if (!(stride_d >= 1.0) || std::fabs(ratio - stride_d) > 1e-9 * stride_d) {
    throw MeshError("residual step must be a positive integer multiple of the solution spacing");
  }
  const auto stride = static_cast<std::size_t>(stride_d);
  const std::size_t count = (sol.times().size() - 1) / stride + 1;
  if (count < 2) throw MeshError("residual step leaves fewer than two time samples");
  std::vector<double> t(count);
  for (std::size_t m = 0; m < count; ++m) t[m] = sol.times()[m * stride];

  const std::int64_t k = sol.truncation_radius_sq();
  const ModeData md = gather_modes(spec, k);
  std::map<MultiIndex, std::size_t> position;
  for (std::size_t i = 0; i < md.indices.size(); ++i) position.emplace(md.indices[i], i);

  // res[mode][m] = D w + lambda w - f_n(t_m) on the retained modes.
  const auto& modes = sol.modes();
  std::vector<std::vector<Complex>> res(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    std::vector<Complex> w(count);
    for (std::size_t m = 0; m < count; ++m) w[m] = modes[j].solution.values[m * stride];
    const std::vector<Complex> d = time_derivative_uniform(w, dt, sol.rho());
    const auto lambda = static_cast<double>(modes[j].index.norm_sq());
    const auto it = position.find(modes[j].index);
    const ModeForcing f =
        it == position.end() ? ModeForcing{} : forcing_for(spec, md, it->second);
    res[j].resize(count);
    for (std::size_t m = 1; m < count; ++m) res[j][m] = d[m] + lambda * w[m] - f(t[m]);
  }

  ResidualReport rep;
  rep.dt = dt;
  rep.truncation_radius_sq = k;
  double worst_mode = 0.0;
  for (std::size_t m = 1; m < count; ++m) {
    std::vector<SpectralField::Entry> entries;
    entries.reserve(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
      entries.push_back({modes[j].index, res[j][m]});
      if (t[m] >= 0.05 * spec.T && std::abs(res[j][m]) > worst_mode) {
        worst_mode = std::abs(res[j][m]);
        rep.per_mode_worst = modes[j].index;
      }
    }
    const double s =
        synthesize(SpectralField::from_entries(sol.dim(), k, std::move(entries)), sol.grid_M())
            .sup_norm();
    if (t[m] >= 0.05 * spec.T) {
      rep.sup_residual = std::max(rep.sup_residual, s);
    } else {
      rep.initial_layer_residual = std::max(rep.initial_layer_residual, s);
    }
  }

  std::vector<SpectralField::Entry> phi_entries;
  for (std::size_t i = 0; i < md.indices.size(); ++i) {
    if (md.phi[i] != 0.0) phi_entries.push_back({md.indices[i], md.phi[i]});
  }
  const GridField phi_grid =
      synthesize(SpectralField::from_entries(sol.dim(), k, std::move(phi_entries)), sol.grid_M());
  const GridField u0 = sol.render(0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    rep.initial_error = std::max(rep.initial_error, std::abs(u0[i] - phi_grid[i]));
  }

  const double a = spec.regularity_exponent_a;
  rep.tail_norm_estimates = {truncation_tail(spec, a, k, spec.T),
                             truncation_tail(spec, a, k, spec.T / 2)};
  return rep;
}

double truncation_tail(const ProblemSpec& spec, double a, std::int64_t truncation_radius_sq,
                       double t) {
  spec.validate();
  if (!(t > 0.0)) throw DomainError("tail indicator needs t > 0");
  double phi_tail = 0.0;
  const SpectralField phi = coefficients_of(spec.phi);
  for (const auto& e : phi.entries()) {
    const auto nsq = e.index.norm_sq();
    if (nsq >= truncation_radius_sq) {
      phi_tail += std::pow(static_cast<double>(nsq), a) * std::norm(e.value);
    }
  }
  std::map<MultiIndex, double> source_bound;
  for (const auto& term : spec.source) {
    const double q = term.q.sup_abs(spec.T);
    if (q == 0.0) continue;
    const SpectralField g = coefficients_of(term.g);
    for (const auto& e : g.entries()) {
      if (e.index.norm_sq() >= truncation_radius_sq) source_bound[e.index] += std::abs(e.value) * q;
    }
  }
  double source_tail = 0.0;
  for (const auto& [n, b] : source_bound) {
    source_tail += std::pow(static_cast<double>(n.norm_sq()), a) * b * b;
  }
  return std::pow(t, -2.0 * spec.rho) * phi_tail + source_tail;
}

}  // namespace fracspec
