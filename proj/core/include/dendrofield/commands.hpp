#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dendrofield/analysis.hpp"
#include "dendrofield/config.hpp"
#include "dendrofield/stepper.hpp"

namespace dendrofield {

// Each command creates config.output_dir if needed, writes its files there
// together with a resolved copy of the config (config.resolved), and returns
// the computed data so callers need not re-read the files.

struct SimulateResult {
  RunRecord record;
  std::vector<std::filesystem::path> files;
};

/// Snapshots (snapshots.hdr/.bin; the final state alone when
/// snapshot_stride is 0) and trace.csv with step, time, max |V|, |V|_inf and
/// max |V| on the somatic row.
SimulateResult cmd_simulate(const RunConfig& config);

struct WaveSpeedRow {
  double theta = 0.0;
  /// Root of the speed equation in its classical form (decay rate 1).
  double v_theory = 0.0;
  /// Root with decay rate 1/2, exact for the ExpDecay kernel.
  double v_kernel = 0.0;
  double v_measured = 0.0;
  double fit_residual = 0.0;
  bool residual_warning = false;
};

struct WaveSpeedResult {
  std::vector<WaveSpeedRow> rows;
  std::vector<std::string> warnings;
};

/// Needs the Sigmoid rate and the ExpDecay kernel; every theta in the list
/// replaces the rate's threshold. Writes wave_speed.csv.
WaveSpeedResult cmd_wave_speed(const RunConfig& config);

struct TuringResult {
  TuringThreshold threshold;
  /// Slope S'(0) of the configured rate used for the dispersion curve.
  double slope0 = 0.0;
  std::vector<double> p;
  /// w_hat(p) - w_* with w_* = scaled_w_star / slope0.
  std::vector<double> margin;
  std::vector<TuringRun> runs;
};

/// Needs the MexicanHat kernel. Writes turing_dispersion.csv (p, w_hat(p) - w_*)
/// and turing_growth.csv (beta, growth factor).
TuringResult cmd_turing(const RunConfig& config);

struct ConvergeRow {
  /// Step size, grid size (n_x), eps or beta of this level.
  double level = 0.0;
  /// Error against the finest run (tau, h) or against the speed equation (eps, beta).
  double error = 0.0;
  /// tau, h: max difference to the next finer level; eps, beta: error against
  /// the decay-rate-1/2 root.
  double increment = 0.0;
  /// log2 ratio of consecutive increments (tau, h); NaN where undefined.
  double order = 0.0;
};

struct ConvergeResult {
  std::string axis;
  std::vector<ConvergeRow> rows;
  /// h axis: relative change of the finest increment when tau is halved.
  double tau_check = 0.0;
};

/// Writes converge.csv.
ConvergeResult cmd_converge(const RunConfig& config);

struct BenchRow {
  std::string algorithm;  // "matrix" or "vector"
  std::string evaluator;
  int n_x = 0;
  int n_xi = 0;
  std::uint64_t flops_per_step = 0;
  double seconds_per_step = 0.0;
  std::uint64_t working_set = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Log-log slopes of flops per step against n_x (matrix form, per evaluator)
  /// and against n (vector form, n_x = n_xi = n).
  double exponent_fft = 0.0;
  double exponent_compact = 0.0;
  double exponent_vector = 0.0;
  double time_exponent_fft = 0.0;
  double time_exponent_vector = 0.0;
  /// Working-set ratio vector / matrix form at the largest matrix-form rung.
  double working_set_ratio = 0.0;
};

/// Writes bench.csv and bench_summary.csv.
BenchResult cmd_bench(const RunConfig& config);

/// Dispatches on config.experiment.
void run_experiment(const RunConfig& config);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dendrofield
