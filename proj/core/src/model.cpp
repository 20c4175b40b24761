#include "dendrofield/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

// exp() of anything beyond this saturates the logistic to 0/1 in double
constexpr double kExpClamp = 700.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double logistic(double z) {
  z = std::clamp(z, -kExpClamp, kExpClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

void require_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0))
    throw ValidationError(std::string(what) + " must be > 0");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(gamma, "gamma");
  require_positive(nu, "nu");
  require_finite(xi_0, "xi_0");
  require_positive(eps, "eps");
}

void validate(const FiringRate& rate) {
  std::visit(Overloaded{
                 [](const Sigmoid& s) {
                   require_positive(s.beta, "beta");
                   require_finite(s.theta, "theta");
                 },
                 [](const ShiftedSigmoid& s) { require_positive(s.beta, "beta"); },
                 [](const Heaviside& s) { require_finite(s.theta, "theta"); },
             },
             rate);
}

double eval_firing_rate(const FiringRate& rate, double v) {
  return std::visit(Overloaded{
                        [v](const Sigmoid& s) { return logistic(s.beta * (v - s.theta)); },
                        [v](const ShiftedSigmoid& s) { return logistic(s.beta * v) - 0.5; },
                        [v](const Heaviside& s) {
                          if (v > s.theta) return 1.0;
                          if (v < s.theta) return 0.0;
                          return 0.5;
                        },
                    },
                    rate);
}

double firing_rate_slope_at_zero(const FiringRate& rate) {
  return std::visit(Overloaded{
                        [](const Sigmoid& s) {
                          // beta e^{beta theta} / (1 + e^{beta theta})^2 = beta l (1 - l)
                          const double l = logistic(-s.beta * s.theta);
                          return s.beta * l * (1.0 - l);
                        },
                        [](const ShiftedSigmoid& s) { return 0.25 * s.beta; },
                        [](const Heaviside&) -> double {
                          throw ValidationError("slope undefined at threshold");
                        },
                    },
                    rate);
}

double firing_rate_bound(const FiringRate& rate) {
  return std::holds_alternative<ShiftedSigmoid>(rate) ? 0.5 : 1.0;
}

double firing_rate_lipschitz(const FiringRate& rate) {
  return std::visit(Overloaded{
                        [](const Sigmoid& s) { return 0.25 * s.beta; },
                        [](const ShiftedSigmoid& s) { return 0.25 * s.beta; },
                        [](const Heaviside&) { return std::numeric_limits<double>::infinity(); },
                    },
                    rate);
}

void validate(const SomaticKernel& kernel) {
  std::visit(Overloaded{
                 [](const ExpDecay& k) { require_positive(k.kappa, "kappa"); },
                 [](const MexicanHat& k) {
                   require_positive(k.a1, "a1");
                   require_positive(k.b1, "b1");
                   require_positive(k.a2, "a2");
                   require_positive(k.b2, "b2");
                 },
             },
             kernel);
}

double eval_kernel(const SomaticKernel& kernel, double d) {
  d = std::abs(d);
  return std::visit(Overloaded{
                        [d](const ExpDecay& k) { return 0.5 * k.kappa * std::exp(-0.5 * d); },
                        [d](const MexicanHat& k) {
                          return k.a1 * std::exp(-k.b1 * d) - k.a2 * std::exp(-k.b2 * d);
                        },
                    },
                    kernel);
}

double kernel_fourier(const SomaticKernel& kernel, double p) {
  // FT of a exp(-b|x|) is 2ab / (b^2 + p^2)
  const double p2 = p * p;
  return std::visit(Overloaded{
                        [p2](const ExpDecay& k) { return k.kappa / (2.0 * (0.25 + p2)); },
                        [p2](const MexicanHat& k) {
                          return 2.0 * k.a1 * k.b1 / (k.b1 * k.b1 + p2) -
                                 2.0 * k.a2 * k.b2 / (k.b2 * k.b2 + p2);
                        },
                    },
                    kernel);
}

double kernel_bound(const SomaticKernel& kernel) {
  return std::visit(Overloaded{
                        [](const ExpDecay& k) { return 0.5 * k.kappa; },
                        // both exponentials lie in [0, a], so w lies in [-a2, a1]
                        [](const MexicanHat& k) { return std::max(k.a1, k.a2); },
                    },
                    kernel);
}

void validate(const DendriticDelta& delta) {
  std::visit(Overloaded{
                 [](const GaussianDelta& d) { require_positive(d.eps, "eps"); },
                 [](const TruncatedGaussianDelta& d) {
                   require_positive(d.eps, "eps");
                   require_positive(d.kappa_d, "kappa_d");
                 },
             },
             delta);
}

double eval_delta(const DendriticDelta& delta, double xi) {
  return std::visit(Overloaded{
                        [xi](const GaussianDelta& d) {
                          const double s = xi / d.eps;
                          return std::exp(-s * s) / (d.eps * std::sqrt(std::numbers::pi));
                        },
                        [xi](const TruncatedGaussianDelta& d) {
                          if (std::abs(xi) >= d.eps) return 0.0;
                          const double s = xi / d.eps;
                          return d.kappa_d * std::exp(-s * s);
                        },
                    },
                    delta);
}

bool has_compact_support(const DendriticDelta& delta) {
  return std::holds_alternative<TruncatedGaussianDelta>(delta);
}

double delta_width(const DendriticDelta& delta) {
  return std::visit([](const auto& d) { return d.eps; }, delta);
}

void ModelSpec::validate() const {
  params.validate();
  dendrofield::validate(rate);
  dendrofield::validate(kernel);
  dendrofield::validate(delta);
}

}  // namespace dendrofield
