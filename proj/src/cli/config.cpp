#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fracspec/counterexample.hpp"
#include "fracspec/errors.hpp"

namespace fracspec::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("'" + key + "' in " + where + " must be finite");
  return d;
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::int64_t integer(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' in " + where + " must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t integer_or(const json& j, const std::string& key, std::int64_t fallback,
                        const std::string& where) {
  return j.contains(key) ? integer(j, key, where) : fallback;
}

std::vector<double> number_list(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError("'" + key + "' in " + where + " must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must hold numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

FieldSource parse_field(const json& j, std::size_t dim, const std::string& where) {
  FieldSource f;
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  if (j.contains("modes")) {
    only_keys(j, {"modes"}, where);
    f.kind = FieldSource::Kind::modes;
    const json& modes = j.at("modes");
    if (!modes.is_array()) throw ConfigError(where + ".modes must be an array");
    for (const auto& row : modes) {
      if (!row.is_array() || row.size() != dim + 2) {
        throw ConfigError(where + ".modes rows must be [n_1..n_N, re, im] with N = " +
                          std::to_string(dim));
      }
      std::vector<std::int64_t> idx;
      for (std::size_t a = 0; a < dim; ++a) {
        if (!row[a].is_number_integer()) throw ConfigError(where + ".modes indices must be integers");
        idx.push_back(row[a].get<std::int64_t>());
      }
      if (!row[dim].is_number() || !row[dim + 1].is_number()) {
        throw ConfigError(where + ".modes values must be numbers");
      }
      f.indices.push_back(std::move(idx));
      f.values.emplace_back(row[dim].get<double>(), row[dim + 1].get<double>());
    }
    return f;
  }
  if (!j.contains("builtin") || !j.at("builtin").is_string()) {
    throw ConfigError(where + " needs either 'modes' or a 'builtin' name");
  }
  const std::string name = j.at("builtin").get<std::string>();
  if (name == "cosine_mode") {
    only_keys(j, {"builtin", "n", "amplitude"}, where);
    f.kind = FieldSource::Kind::cosine_mode;
    if (!j.contains("n") || !j.at("n").is_array() || j.at("n").size() != dim) {
      throw ConfigError(where + ".n must list " + std::to_string(dim) + " integers");
    }
    for (const auto& v : j.at("n")) {
      if (!v.is_number_integer()) throw ConfigError(where + ".n must list integers");
      f.n.push_back(v.get<std::int64_t>());
    }
    f.amplitude = number_or(j, "amplitude", 1.0, where);
  } else if (name == "constant") {
    only_keys(j, {"builtin", "value"}, where);
    f.kind = FieldSource::Kind::constant;
    f.value = number(j, "value", where);
  } else if (name == "hardy_littlewood") {
    only_keys(j, {"builtin", "k_max"}, where);
    if (dim != 1) throw ConfigError(where + ": hardy_littlewood is defined for dimension 1");
    f.kind = FieldSource::Kind::hardy_littlewood;
    f.k_max = integer(j, "k_max", where);
    if (f.k_max < 2) throw ConfigError(where + ".k_max must be >= 2");
  } else {
    throw ConfigError("unknown builtin '" + name + "' in " + where);
  }
  return f;
}

TimeProfile parse_profile(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(where + " must be an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") {
      only_keys(j, {"kind", "value"}, where);
      return TimeProfile::constant(number(j, "value", where));
    }
    if (kind == "polynomial") {
      only_keys(j, {"kind", "coeffs"}, where);
      return TimeProfile::polynomial(number_list(j, "coeffs", where));
    }
    if (kind == "cosine") {
      only_keys(j, {"kind", "omega", "phase"}, where);
      return TimeProfile::cosine(number(j, "omega", where), number_or(j, "phase", 0.0, where));
    }
    if (kind == "exponential") {
      only_keys(j, {"kind", "rate"}, where);
      return TimeProfile::exponential(number(j, "rate", where));
    }
    if (kind == "sampled") {
      only_keys(j, {"kind", "nodes", "values"}, where);
      return TimeProfile::sampled(number_list(j, "nodes", where), number_list(j, "values", where));
    }
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError("unknown time profile kind '" + kind + "' in " + where);
}

json field_to_json(const FieldSource& f) {
  switch (f.kind) {
    case FieldSource::Kind::modes: {
      json rows = json::array();
      for (std::size_t i = 0; i < f.indices.size(); ++i) {
        json row = json::array();
        for (const auto v : f.indices[i]) row.push_back(v);
        row.push_back(f.values[i].real());
        row.push_back(f.values[i].imag());
        rows.push_back(std::move(row));
      }
      return {{"modes", std::move(rows)}};
    }
    case FieldSource::Kind::cosine_mode:
      return {{"builtin", "cosine_mode"}, {"n", f.n}, {"amplitude", f.amplitude}};
    case FieldSource::Kind::constant:
      return {{"builtin", "constant"}, {"value", f.value}};
    case FieldSource::Kind::hardy_littlewood:
      return {{"builtin", "hardy_littlewood"}, {"k_max", f.k_max}};
  }
  return {};
}

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

SpectralField FieldSource::build(std::size_t dim) const {
  const std::int64_t k = max_norm_sq() + 1;
  switch (kind) {
    case Kind::modes: {
      std::vector<SpectralField::Entry> entries;
      for (std::size_t i = 0; i < indices.size(); ++i) {
        entries.push_back({MultiIndex(indices[i]), values[i]});
      }
      return SpectralField::from_entries(dim, k, std::move(entries));
    }
    case Kind::cosine_mode: {
      // amplitude cos(n.x) = amplitude (e^{i n.x} + e^{-i n.x}) / 2
      const MultiIndex idx(n);
      const bool zero = std::all_of(n.begin(), n.end(), [](std::int64_t v) { return v == 0; });
      if (zero) return SpectralField::from_entries(dim, k, {{idx, amplitude}}, true);
      return SpectralField::from_entries(dim, k, {{idx, 0.5 * amplitude}, {idx.negated(), 0.5 * amplitude}},
                                         true);
    }
    case Kind::constant:
      return SpectralField::from_entries(dim, 1, {{MultiIndex(std::vector<std::int64_t>(dim, 0)), value}},
                                         true);
    case Kind::hardy_littlewood:
      return hl_coefficients(k_max).coefficients;
  }
  return SpectralField(dim, 1);
}

std::int64_t FieldSource::max_norm_sq() const {
  switch (kind) {
    case Kind::modes: {
      std::int64_t m = 0;
      for (const auto& idx : indices) m = std::max(m, MultiIndex(idx).norm_sq());
      return m;
    }
    case Kind::cosine_mode:
      return MultiIndex(n).norm_sq();
    case Kind::constant:
      return 0;
    case Kind::hardy_littlewood:
      return k_max * k_max;
  }
  return 0;
}

ProblemSpec RunConfig::problem() const {
  ProblemSpec p;
  p.dim = dim;
  p.rho = rho;
  p.T = T;
  p.phi = phi.build(dim);
  for (const auto& s : source) p.source.push_back({s.g.build(dim), s.q});
  p.regularity_exponent_a = regularity_exponent;
  return p;
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.workers = workers;
  o.strict = strict;
  o.mesh_M = mesh_M;
  o.mesh_r = mesh_r;
  o.modal.tolerance = tolerance;
  o.modal.max_doublings = max_doublings;
  return o;
}

RunConfig parse_config(const json& j) {
  only_keys(j, {"dimension", "rho", "T", "phi", "source", "regularity_exponent", "numerics", "strict",
                "workers", "output_dir"},
            "config");
  RunConfig c;
  const std::int64_t dim = integer_or(j, "dimension", 1, "config");
  if (dim < 1 || dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
  c.dim = static_cast<std::size_t>(dim);
  c.rho = number(j, "rho", "config");
  c.T = number_or(j, "T", 1.0, "config");
  if (!j.contains("phi")) throw ConfigError("missing 'phi' in config");
  c.phi = parse_field(j.at("phi"), c.dim, "phi");
  if (j.contains("source")) {
    const json& src = j.at("source");
    if (!src.is_array()) throw ConfigError("'source' must be an array of {g, q} terms");
    for (std::size_t i = 0; i < src.size(); ++i) {
      const std::string where = "source[" + std::to_string(i) + "]";
      only_keys(src[i], {"g", "q"}, where);
      if (!src[i].contains("g") || !src[i].contains("q")) throw ConfigError(where + " needs 'g' and 'q'");
      c.source.push_back({parse_field(src[i].at("g"), c.dim, where + ".g"),
                          parse_profile(src[i].at("q"), where + ".q")});
    }
  }
  c.regularity_exponent =
      number_or(j, "regularity_exponent", static_cast<double>(c.dim) / 2.0 + 0.5, "config");
  if (j.contains("numerics")) {
    const json& nm = j.at("numerics");
    only_keys(nm, {"truncation_radius_sq", "grid_M", "dt", "mesh_M", "mesh_r", "tolerance", "max_doublings"},
              "numerics");
    c.truncation_radius_sq = integer_or(nm, "truncation_radius_sq", 0, "numerics");
    c.grid_M = static_cast<std::size_t>(std::max<std::int64_t>(0, integer_or(nm, "grid_M", 0, "numerics")));
    if (integer_or(nm, "grid_M", 0, "numerics") < 0) throw ConfigError("grid_M must be positive");
    c.dt = number_or(nm, "dt", 0.0, "numerics");
    const std::int64_t mesh_M = integer_or(nm, "mesh_M", 64, "numerics");
    if (mesh_M < 2) throw ConfigError("mesh_M must be >= 2");
    c.mesh_M = static_cast<std::size_t>(mesh_M);
    c.mesh_r = number_or(nm, "mesh_r", 0.0, "numerics");
    c.tolerance = number_or(nm, "tolerance", 0.0, "numerics");
    const std::int64_t md = integer_or(nm, "max_doublings", 10, "numerics");
    if (md < 0 || md > 20) throw ConfigError("max_doublings must lie in [0, 20]");
    c.max_doublings = static_cast<int>(md);
  }
  if (j.contains("strict")) {
    if (!j.at("strict").is_boolean()) throw ConfigError("'strict' must be a boolean");
    c.strict = j.at("strict").get<bool>();
  }
  if (j.contains("workers")) {
    const std::int64_t w = integer(j, "workers", "config");
    if (w < 1) throw ConfigError("workers must be positive");
    c.workers = static_cast<std::size_t>(w);
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("'output_dir' must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  return c;
}

void resolve(RunConfig& c, std::size_t default_steps) {
  if (!(c.rho > 0.0 && c.rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.truncation_radius_sq == 0) {
    std::int64_t m = c.phi.max_norm_sq();
    for (const auto& s : c.source) m = std::max(m, s.g.max_norm_sq());
    c.truncation_radius_sq = m + 1;
  }
  if (c.truncation_radius_sq < 1) throw ConfigError("truncation_radius_sq must be positive");
  const std::int64_t box = c.truncation_radius_sq <= 1 ? 0 : isqrt(c.truncation_radius_sq - 1);
  if (c.grid_M == 0) c.grid_M = static_cast<std::size_t>(std::max<std::int64_t>(2 * box + 1, 9));
  if (c.grid_M < 3 || c.grid_M % 2 == 0) throw ConfigError("grid_M must be odd and >= 3");
  if (static_cast<std::int64_t>((c.grid_M - 1) / 2) < box) {
    throw ConfigError("grid_M = " + std::to_string(c.grid_M) + " aliases the truncation |n|^2 < " +
                      std::to_string(c.truncation_radius_sq));
  }
  if (c.dt == 0.0) c.dt = c.T / static_cast<double>(default_steps);
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  const double steps = c.T / c.dt;
  if (std::fabs(steps - std::round(steps)) > 1e-9 * std::round(steps) || std::round(steps) < 1.0) {
    throw ConfigError("T / dt must be a positive integer");
  }
  if (!(c.mesh_r == 0.0 || c.mesh_r >= 1.0)) throw ConfigError("mesh_r must be 0 (auto) or >= 1");
  if (!(c.tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (c.workers < 1) throw ConfigError("workers must be positive");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

json to_json(const TimeProfile& q) {
  switch (q.kind()) {
    case TimeProfile::Kind::constant:
      return {{"kind", "constant"}, {"value", q.constant_value()}};
    case TimeProfile::Kind::polynomial:
      return {{"kind", "polynomial"}, {"coeffs", q.coefficients()}};
    case TimeProfile::Kind::cosine:
      return {{"kind", "cosine"}, {"omega", q.omega()}, {"phase", q.phase()}};
    case TimeProfile::Kind::exponential:
      return {{"kind", "exponential"}, {"rate", q.rate()}};
    case TimeProfile::Kind::sampled:
      return {{"kind", "sampled"}, {"nodes", q.nodes()}, {"values", q.values()}};
  }
  return {};
}

json to_json(const RunConfig& c) {
  json src = json::array();
  for (const auto& s : c.source) src.push_back({{"g", field_to_json(s.g)}, {"q", to_json(s.q)}});
  return {
      {"dimension", c.dim},
      {"rho", c.rho},
      {"T", c.T},
      {"phi", field_to_json(c.phi)},
      {"source", std::move(src)},
      {"regularity_exponent", c.regularity_exponent},
      {"numerics",
       {{"truncation_radius_sq", c.truncation_radius_sq},
        {"grid_M", c.grid_M},
        {"dt", c.dt},
        {"mesh_M", c.mesh_M},
        {"mesh_r", c.mesh_r},
        {"tolerance", c.tolerance},
        {"max_doublings", c.max_doublings}}},
      {"strict", c.strict},
      {"workers", c.workers},
  };
}

}  // namespace fracspec::cli
