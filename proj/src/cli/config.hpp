#pragma once

// JSON run configuration: parsing into library types and the resolved echo.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracspec/solver.hpp"
#include "json.hpp"

namespace fracspec::cli {

/// Spatial datum as written in the config, kept for the echo.
struct FieldSource {
  enum class Kind { modes, cosine_mode, constant, hardy_littlewood };
  Kind kind = Kind::modes;
  std::vector<std::vector<std::int64_t>> indices;  // modes
  std::vector<Complex> values;                     // modes
  std::vector<std::int64_t> n;                     // cosine_mode
  double amplitude = 1.0;                          // cosine_mode
  double value = 0.0;                              // constant
  std::int64_t k_max = 0;                          // hardy_littlewood

  [[nodiscard]] SpectralField build(std::size_t dim) const;
  [[nodiscard]] std::int64_t max_norm_sq() const;
};

struct SourceSpec {
  FieldSource g;
  TimeProfile q;
};

struct RunConfig {
  std::size_t dim = 1;
  double rho = 0.5;
  double T = 1.0;
  FieldSource phi;
  std::vector<SourceSpec> source;
  double regularity_exponent = 1.0;

  std::int64_t truncation_radius_sq = 0;
  std::size_t grid_M = 0;
  double dt = 0.0;
  std::size_t mesh_M = 64;
  double mesh_r = 0.0;
  double tolerance = 0.0;
  int max_doublings = 10;
  bool strict = false;
  std::size_t workers = 1;
  std::string output_dir = ".";

  [[nodiscard]] ProblemSpec problem() const;
  [[nodiscard]] SolveOptions solve_options() const;
};

/// Throws ConfigError on malformed or out-of-range input. Numerics absent
/// from the document stay 0 until resolve().
RunConfig parse_config(const nlohmann::json& j);

/// Fills unset numerics: truncation covers every given mode, grid_M is the
/// smallest alias-free odd size (at least 9), dt = T / default_steps. Then
/// validates the whole configuration (ConfigError).
void resolve(RunConfig& c, std::size_t default_steps);

/// Fully resolved configuration, reproducing the run when parsed again. The
/// output directory is left out so that runs into different directories
/// produce identical files.
nlohmann::json to_json(const RunConfig& c);

nlohmann::json to_json(const TimeProfile& q);

}  // namespace fracspec::cli
