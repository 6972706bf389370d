#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrmass::cli {

enum class Command { Mass, Curvature, VStatic, Critical, Coercivity, Compare, Project };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

struct BumpSpec {
  /// "rr" or "tan"
  std::string component = "rr";
  double centre = 3.0;
  double half_width = 1.0;
  /// Relative to the reference coefficient at the centre.
  double amplitude = 0.01;
};

struct RunConfig {
  // manifold
  int n = 3;
  int k = 1;
  /// Defaults to the area of the unit (n-1)-sphere when k = 1.
  std::optional<double> cross_section_volume;
  std::optional<double> inner_radius;

  // metric: reference | schwarzschild_ads | reference_plus_profiles | sampled
  std::string metric_kind = "reference";
  double kottler_mass = 1.0;
  /// Put the inner boundary at horizon·(1 + offset) for schwarzschild_ads.
  bool with_boundary = false;
  double boundary_offset = 1e-2;
  std::optional<double> tau;
  std::vector<BumpSpec> profiles;
  /// CSV with header r,q,w; resolved relative to the config file.
  std::string sample_file;

  // grid
  double r_max = 1e3;
  int points_per_decade = 40;
  double quadrature_tol = 1e-8;
  std::uint64_t seed = 1;
  int mass_cutoffs = 7;
  double mass_r_start = 0.0;

  // command
  Command command = Command::Mass;
  /// True when the config file named the command explicitly.
  bool command_named = false;
  /// Verdict threshold of critical / compare / vstatic.
  std::optional<double> tol;
  std::string potential;  // one | kottler | bounded | trace
  double lambda = 0.0;
  std::optional<double> trace_boundary_value;
  int count = 20;
  double step = 1e-3;
  double amplitude = 0.05;
  double boundary_tol = 1e-8;
  int n_min = 3;
  int n_max = 10;
  double delta = 0.99;
  int samples = 2001;
  double outer_radius = 1e4;
  int per_decade = 400;
};

/// Throws ValidationError naming the offending field.
RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
void validate(const RunConfig& cfg);

struct RunOptions {
  /// Empty: nothing is written.
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

struct RunOutcome {
  /// 0 success, 1 validation error, 2 solver or convergence failure.
  int exit_code = 0;
  /// The run.json document.
  std::string report;
  std::vector<std::string> written;
};

/// Never throws for configuration or numerical failures; they are reported
/// through the exit code and the report's "status" and "diagnostic".
RunOutcome run(RunConfig cfg, const RunOptions& opts);

}  // namespace vrmass::cli
