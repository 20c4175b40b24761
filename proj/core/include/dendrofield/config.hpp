#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dendrofield/analysis.hpp"
#include "dendrofield/stepper.hpp"

namespace dendrofield {

/// Everything one invocation of the CLI needs. Parsed from a flat
/// "key = value" file; [section] headers group keys and are optional for
/// keys whose name is unique across sections.
struct RunConfig {
  std::string experiment = "simulate";
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  SimulationConfig sim;

  // wave-speed
  std::vector<double> thetas{0.01};
  double fit_start = 1.0;
  double fit_end = 3.5;

  // turing; an empty list means {0.9, 1.1} x the computed critical beta
  std::vector<double> betas;
  TuringSettings turing;

  // converge
  std::string converge_axis = "tau";
  /// tau/h axes: number of refinement levels (reference is one level finer);
  /// eps/beta axes: the parameter values to sweep.
  std::vector<double> converge_levels;
  double converge_t_final = 2.0;

  // bench
  std::vector<int> bench_n_x{64, 128, 256, 512};
  int bench_n_xi = 64;
  std::vector<int> bench_reference_sizes{8, 16, 32};
  int bench_steps = 5;

  /// Throws ValidationError naming the key and the violated precondition.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses config text; errors carry the source name and line number.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical text form with every key written under its section; parses
/// back to an equal RunConfig.
std::string write_config(const RunConfig& config);

/// Names of all recognised keys as "section.key".
std::vector<std::string> known_config_keys();

}  // namespace dendrofield
