#pragma once

#include <string>
#include <variant>

namespace dendrofield {

/// Leak rate gamma, dendritic diffusivity nu, contact offset xi_0 and the
/// width eps of the dendritic delta profile.
struct PhysicalParams {
  double gamma = 1.0;
  double nu = 0.4;
  double xi_0 = 1.0;
  double eps = 0.005;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

// ---- firing rates ---------------------------------------------------------

/// 1 / (1 + exp(-beta (v - theta))).
struct Sigmoid {
  double beta = 1000.0;
  double theta = 0.01;
  bool operator==(const Sigmoid&) const = default;
};

/// 1 / (1 + exp(-beta v)) - 1/2, so that S(0) = 0.
struct ShiftedSigmoid {
  double beta = 30.0;
  bool operator==(const ShiftedSigmoid&) const = default;
};

/// H(v - theta) with H(0) = 1/2.
struct Heaviside {
  double theta = 0.01;
  bool operator==(const Heaviside&) const = default;
};

using FiringRate = std::variant<Sigmoid, ShiftedSigmoid, Heaviside>;

void validate(const FiringRate& rate);
double eval_firing_rate(const FiringRate& rate, double v);
/// S'(0); throws ValidationError for Heaviside.
double firing_rate_slope_at_zero(const FiringRate& rate);
/// sup |S| over the real line (C_S).
double firing_rate_bound(const FiringRate& rate);
/// sup |S'| over the real line; infinite for Heaviside.
double firing_rate_lipschitz(const FiringRate& rate);

// ---- somatic kernels ------------------------------------------------------

/// w(x) = (kappa/2) exp(-|x|/2).
struct ExpDecay {
  double kappa = 3.0;
  bool operator==(const ExpDecay&) const = default;
};

/// w(x) = a1 exp(-b1 |x|) - a2 exp(-b2 |x|).
struct MexicanHat {
  double a1 = 1.0;
  double b1 = 1.0;
  double a2 = 0.25;
  double b2 = 0.5;
  bool operator==(const MexicanHat&) const = default;
};

using SomaticKernel = std::variant<ExpDecay, MexicanHat>;

void validate(const SomaticKernel& kernel);
/// Kernel at distance d >= 0.
double eval_kernel(const SomaticKernel& kernel, double d);
/// Closed-form Fourier transform; real because w is even.
double kernel_fourier(const SomaticKernel& kernel, double p);
/// max |w| over d >= 0.
double kernel_bound(const SomaticKernel& kernel);

// ---- dendritic delta profiles ---------------------------------------------

/// exp(-xi^2/eps^2) / (eps sqrt(pi)).
struct GaussianDelta {
  double eps = 0.005;
  bool operator==(const GaussianDelta&) const = default;
};

/// kappa_d exp(-xi^2/eps^2) on (-eps, eps), zero elsewhere.
struct TruncatedGaussianDelta {
  double eps = 0.005;
  double kappa_d = 1.0;
  bool operator==(const TruncatedGaussianDelta&) const = default;
};

using DendriticDelta = std::variant<GaussianDelta, TruncatedGaussianDelta>;

void validate(const DendriticDelta& delta);
double eval_delta(const DendriticDelta& delta, double xi);
bool has_compact_support(const DendriticDelta& delta);
double delta_width(const DendriticDelta& delta);

/// Everything that defines the continuum model apart from forcing and
/// initial data. delta.eps is kept equal to params.eps by the config layer.
struct ModelSpec {
  PhysicalParams params;
  FiringRate rate = Sigmoid{};
  SomaticKernel kernel = ExpDecay{};
  DendriticDelta delta = GaussianDelta{};

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

}  // namespace dendrofield
