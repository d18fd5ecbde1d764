// Run configuration: a single self-describing JSON file carries the whole
// physics; command-line flags only pick the subcommand, the config path and
// the output directory.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hylam/evolution.hpp"

#include <json.hpp>

namespace hylam {

struct GeometryConfig {
  double L = 1.0;
  int n_elems = 32;
  bool operator==(const GeometryConfig&) const = default;
};

struct DissipationConfig {
  std::string family = "quadratic";  // quadratic | linear
  double scale = 1.0;
  bool operator==(const DissipationConfig&) const = default;
};

struct MaterialConfig {
  std::string family = "power";
  double a = 1.0;
  double b = 0.5;
  DissipationConfig w;
  bool operator==(const MaterialConfig&) const = default;
};

struct LawConfig {
  std::string kind = "quadratic_unloading";  // quadratic_unloading | separable
  std::string family = "parabolic";          // parabolic | exponential
  double c = 1.0;
  double k = 1.0;
  // separable: tabulated samples, interpolated monotone-cubic
  std::vector<double> phi1_x, phi1_y, phi2_x, phi2_y;
  bool operator==(const LawConfig&) const = default;
};

struct LoadConfig {
  std::string profile = "linear_ramp";  // linear_ramp | triangle | tabulated
  double T = 1.0;
  double rate = 1.0;
  double peak_time = 0.5;
  double peak_value = 1.0;
  double end_value = 0.0;
  std::vector<double> times, values;
  bool operator==(const LoadConfig&) const = default;
};

struct TimeConfig {
  int n_steps = 50;
  std::vector<double> times;  // overrides n_steps when nonempty
  bool operator==(const TimeConfig&) const = default;
};

struct FieldInit {
  std::string family = "constant";  // constant | affine | tabulated
  double value = 0.0;
  double left = 0.0, right = 0.0;
  std::vector<double> values;
  bool operator==(const FieldInit&) const = default;
};

struct InitialConfig {
  FieldInit u1, u2, alpha1, alpha2;
  bool operator==(const InitialConfig&) const = default;
};

struct OutputConfig {
  std::vector<int> snapshot_steps;
  int verbosity = 1;
  bool operator==(const OutputConfig&) const = default;
};

struct SolverConfig {
  int max_outer_iters = 100;
  double tol_energy = 1e-13;
  double tol_grad = 1e-10;
  int n_restarts = 0;
  double restart_amplitude = 0.1;
  double step_init = 1.0;
  double step_shrink = 0.5;
  double step_decrease = 1e-4;
  int max_inner_iters = 200000;
  bool operator==(const SolverConfig&) const = default;
};

struct RunConfig {
  GeometryConfig geometry;
  MaterialConfig material1, material2;
  LawConfig law;
  LoadConfig load;
  TimeConfig time;
  SolverConfig solver;
  InitialConfig initial;
  OutputConfig output;
  std::uint64_t seed = 0;
  bool operator==(const RunConfig&) const = default;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every violation, section.key-qualified
};

ParseResult parse_config_json(const nlohmann::json& j);
ParseResult parse_config_file(const std::string& path);
nlohmann::ordered_json emit_config(const RunConfig& config);

// Physics objects from a validated config; throws on residual
// incompatibilities (e.g. initial data not matching the load at t = 0).
LayerMaterials build_materials(const RunConfig& config);
CohesiveLaw build_law(const RunConfig& config);
LoadProgram build_load(const RunConfig& config);
EvolutionSetup build_setup(const RunConfig& config);

}  // namespace hylam
