#pragma once

#include <complex>
#include <vector>

#include "dendrofield/model.hpp"
#include "dendrofield/stepper.hpp"

namespace dendrofield {

// ---- travelling fronts ----------------------------------------------------

/// sqrt((gamma + v) / nu). Throws ValidationError for v <= -gamma.
double psi(double v, double nu, double gamma);
/// Principal branch of sqrt((gamma + lambda) / nu).
std::complex<double> psi(std::complex<double> lambda, double nu, double gamma);

struct FrontParams {
  double theta = 0.01;
  double kappa = 3.0;
  double xi_0 = 1.0;
  double gamma = 1.0;
  double nu = 0.4;
  /// b in psi(b v). b = 1 is the classical form of the speed equation; the
  /// front of the ExpDecay kernel (kappa/2) exp(-|x|/2) solves it exactly
  /// with b = 1/2.
  double decay_rate = 1.0;
};

/// kappa exp(-psi(b v) xi_0) / (2 psi(b v) nu) - theta; strictly decreasing in v.
double speed_residual(double v, const FrontParams& fp);

/// Root of speed_residual by bisection on [-gamma/b + tol, v_max], with v_max
/// doubled until the residual turns negative (cap 1e6). Throws NumericalError
/// when no sign change is found below the cap.
double theoretical_wave_speed(const FrontParams& fp, double tol = 1e-10);

struct LevelSetTrace {
  std::vector<double> times;
  std::vector<double> positions;
  /// false where no theta-crossing was found on [0, L_x] (position is NaN).
  std::vector<bool> found;
};

/// Rightmost theta-crossing x_*(t) of each recorded somatic row on [0, L_x],
/// located by linear interpolation between bracketing nodes.
LevelSetTrace track_level_set(const RowSeries& series, double theta);

struct SpeedMeasurement {
  double speed = 0.0;
  /// RMS deviation of x_*(t) from the fitted line over the window.
  double fit_residual = 0.0;
  /// Set when fit_residual exceeds half a somatic grid spacing (window
  /// probably includes the ignition transient or the collision of fronts).
  bool residual_warning = false;
  /// First-order differences of x_*(t) between consecutive samples in the window.
  std::vector<double> pointwise_speeds;
  LevelSetTrace trace;
};

/// Least-squares slope of x_*(t) over t in [t_begin, t_end]. Throws
/// NumericalError if fewer than two samples in the window have a crossing.
SpeedMeasurement measure_wave_speed(const RowSeries& series, double theta, double t_begin,
                                    double t_end);

// ---- static Turing instability -------------------------------------------

struct DispersionContext {
  PhysicalParams params;
  SomaticKernel kernel;
  /// S'(0)
  double slope0 = 0.0;
};

/// 1 - S'(0) exp(-psi(lambda) xi_0) / (2 psi(lambda) nu) w_hat(p). Throws
/// ValidationError unless Re(lambda) > -gamma.
std::complex<double> dispersion_value(const DispersionContext& ctx, std::complex<double> lambda,
                                      double p);

struct TuringThreshold {
  /// 2 psi(0) nu exp(psi(0) xi_0), i.e. w_* S'(0).
  double scaled_w_star = 0.0;
  /// argmax_p w_hat(p) (0 when w_hat peaks at the origin).
  double p_star = 0.0;
  double w_hat_max = 0.0;
  /// S'(0) at which w_hat(p_star) = w_*; infinite if w_hat(p_star) <= 0.
  double critical_slope = 0.0;
  bool interior_peak = false;

  /// For S(V) = 1/(1+exp(-beta V)) - 1/2, S'(0) = beta / 4.
  double critical_beta_shifted_sigmoid() const { return 4.0 * critical_slope; }
};

TuringThreshold static_turing_threshold(const PhysicalParams& params, const SomaticKernel& kernel);

struct TuringSettings {
  int n_x = 256;
  int n_xi = 257;
  double tau = 0.01;
  double t_final = 40.0;
  double amplitude = 0.01;
  bool operator==(const TuringSettings&) const = default;
};

struct TuringRun {
  double beta = 0.0;
  double growth_factor = 0.0;
  std::vector<double> times;
  std::vector<double> somatic_max;
};

/// Ratio of the mean of the trace over its last quarter to the mean over
/// its first quarter.
double growth_factor(const std::vector<double>& trace);

/// For each beta, simulates the trivial state of the shifted-sigmoid model
/// perturbed by amplitude cos(p_* x) on [-4 pi/p_*, 4 pi/p_*] x
/// [-pi/p_*, pi/p_*] and reports the growth factor of max_x |V(x, 0, t)|.
std::vector<TuringRun> turing_experiment(const PhysicalParams& params, const SomaticKernel& kernel,
                                         const std::vector<double>& betas,
                                         const TuringSettings& settings);

}  // namespace dendrofield
