#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dendrofield/grid.hpp"
#include "dendrofield/linop.hpp"
#include "dendrofield/model.hpp"
#include "dendrofield/nonlocal.hpp"

namespace dendrofield {

/// Voltage matrix V (n_xi rows, n_x columns; V(i, j) ~ V(x_j, xi_i, t)) at
/// one time level. Column j is the dendrite above somatic node j and is
/// contiguous in memory, which is also the flat ordering k = j n_xi + i used
/// by the vector-form reference stepper.
struct FieldState {
  Eigen::MatrixXd values;
  double time = 0.0;
};

// ---- forcing and initial data ---------------------------------------------

struct NoForcing {
  bool operator==(const NoForcing&) const = default;
};

/// amplitude * exp(-((x-cx)/wx)^2 - ((xi-cxi)/wxi)^2) for t_on <= t < t_off,
/// with the x-offset measured on the circle.
struct GaussianPulse {
  double amplitude = 1.0;
  double center_x = 0.0;
  double center_xi = 0.0;
  double width_x = 1.0;
  double width_xi = 1.0;
  double t_on = 0.0;
  double t_off = 1.0;
  bool operator==(const GaussianPulse&) const = default;
};

using ForcingSpec = std::variant<NoForcing, GaussianPulse>;

struct ZeroInitial {
  bool operator==(const ZeroInitial&) const = default;
};
struct ConstantInitial {
  double value = 0.0;
  bool operator==(const ConstantInitial&) const = default;
};
/// amplitude * cos(wavenumber * x), uniform in xi.
struct CosineInX {
  double amplitude = 0.01;
  double wavenumber = 1.0;
  bool operator==(const CosineInX&) const = default;
};
/// amplitude * exp(-((x-cx)/wx)^2 - ((xi-cxi)/wxi)^2). The default ignites a
/// pair of fronts from the contact line xi = xi_0 = 1.
struct GaussianBump {
  double amplitude = 1.0;
  double center_x = 0.0;
  double center_xi = 1.0;
  double width_x = 2.0;
  double width_xi = 1.0;
  bool operator==(const GaussianBump&) const = default;
};

using InitialCondition = std::variant<ZeroInitial, ConstantInitial, CosineInX, GaussianBump>;

void validate(const ForcingSpec& forcing);
void validate(const InitialCondition& initial);
/// Writes G(x_j, xi_i, t) into G (resized to the grid).
void eval_forcing(const ForcingSpec& forcing, const Grid& grid, double t, Eigen::MatrixXd& G);
/// sup |G| (C_G).
double forcing_bound(const ForcingSpec& forcing);
bool forcing_is_zero(const ForcingSpec& forcing);
Eigen::MatrixXd eval_initial(const InitialCondition& initial, const Grid& grid);

// ---- configuration and results ----------------------------------------------

struct GridSpec {
  int n_x = 256;
  int n_xi = 256;
  double L_x = 24.0 * std::numbers::pi;
  double L_xi = 3.0;
  bool operator==(const GridSpec&) const = default;
};

enum class Evaluator { fft, direct, compact };

std::string to_string(Evaluator e);
/// Throws ValidationError for anything but "fft", "direct", "compact".
Evaluator parse_evaluator(const std::string& s);

struct SimulationConfig {
  GridSpec grid;
  ModelSpec model;
  ForcingSpec forcing = NoForcing{};
  InitialCondition initial = GaussianBump{};
  double tau = 0.05;
  int n_t = 200;
  /// Full snapshots at steps 0, stride, 2 stride, ...; 0 keeps only the final state.
  int snapshot_stride = 0;
  /// The somatic row (node nearest xi = 0) is recorded every row_stride steps.
  int row_stride = 1;
  Evaluator evaluator = Evaluator::fft;
  /// Throw if |V^n|_inf ever exceeds the boundedness estimate.
  bool check_bound = true;

  /// Throws ValidationError naming the offending parameter.
  void validate() const;
  bool operator==(const SimulationConfig&) const = default;
};

/// Operation counts, following the per-line accounting of the two
/// algorithms: every function evaluation costs one flop, an m x n
/// matrix-vector product 2mn - m, tridiagonal LU 2n + 1 (or 2n - 1 per the
/// initialisation table), forward/backward substitution 2n - 2 / 3n - 2, and
/// a length-n FFT 5 n log2 n.
struct StepCounters {
  std::uint64_t flops_init = 0;
  std::uint64_t flops_per_step = 0;
  std::uint64_t flops_steps_total = 0;
  std::uint64_t linear_solve_count = 0;
  std::uint64_t fft_count = 0;
  std::uint64_t steps = 0;
};

std::uint64_t fft_flops(int n);

/// Samples of V on the somatic row at a uniform step stride.
struct RowSeries {
  std::vector<double> x;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  double L_x = 0.0;
};

struct RunRecord {
  Grid grid;
  std::vector<FieldState> snapshots;
  FieldState final_state;
  /// max_ij |V^n_ij| for n = 0..n_t.
  std::vector<double> max_abs_trace;
  /// Induced matrix norm |V^n|_inf = max_i sum_j |V^n_ij| for n = 0..n_t.
  std::vector<double> inf_norm_trace;
  /// max_j |V^n(somatic row, j)| for n = 0..n_t.
  std::vector<double> somatic_max_trace;
  RowSeries somatic_rows;
  int somatic_row = 0;
  StepCounters counters;
  double bound = 0.0;
  std::vector<std::string> warnings;
};

/// One IMEX step: V^n = A^{-1}(V^{n-1} + tau N(V^{n-1}) + tau G^{n-1}).
FieldState imex_step(const TridiagFactorization& F, const NonlocalPlan& plan,
                     const FiringRate& rate, const Eigen::MatrixXd& G_prev,
                     const FieldState& V_prev, double tau, Evaluator evaluator = Evaluator::fft);

/// Matrix-form stepper: plan and factorisation built once, then n_t steps.
RunRecord run(const SimulationConfig& config);

/// Vector-form stepper on the flat n_x n_xi unknowns with a sparse LU of
/// (1 + tau gamma) I - tau nu (I kron D) and the literal quadrature for N.
/// Refuses grids with more than max_unknowns nodes.
RunRecord run_reference(const SimulationConfig& config, int max_unknowns = 4096);

/// |V0|_inf + n_x (mu C_W C_S + C_G) / gamma with mu = 4 L_x L_xi.
double lemma1_bound(double V0_norm, const PhysicalParams& params, const Grid& grid, double C_W,
                    double C_S, double C_G);

/// max_i sum_j |V_ij|.
double matrix_inf_norm(const Eigen::MatrixXd& V);

enum class Algorithm { matrix_form, vector_form };

/// Floating point values held by each algorithm, per the storage accounting
/// (matrix form: 4 n_x n_xi + 7 n_xi + 3 n_x; vector form: 7 n_x n_xi + 2 n_xi + 2 n_x).
std::uint64_t working_set_values(Algorithm algorithm, int n_x, int n_xi);

/// Per-step flop count of the matrix-form stepper for the given evaluator;
/// support sizes matter only for Evaluator::compact.
std::uint64_t step_flops_matrix_form(int n_x, int n_xi, Evaluator evaluator,
                                     int support_in = 0, int support_out = 0);
std::uint64_t step_flops_vector_form(int n_x, int n_xi);
std::uint64_t init_flops_matrix_form(int n_x, int n_xi);
std::uint64_t init_flops_vector_form(int n_x, int n_xi);

}  // namespace dendrofield
