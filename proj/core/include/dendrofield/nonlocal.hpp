#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dendrofield/grid.hpp"
#include "dendrofield/model.hpp"

namespace dendrofield {

namespace detail {
class CircularConvolver;
}

/// Precomputed data for evaluating the nonlocal coupling
///
///   N_ij = alpha_i h_x sum_j' w_{j-j'} sum_i' alpha'_i' sigma_i' S(V_i'j').
///
/// w_samples()[m] is the kernel at wrapped displacement m h_x (m = 0..n_x-1),
/// i.e. the first column of the circulant matrix w(|x_j - x_j'|). w_hat() is
/// its forward DFT (unnormalised, half spectrum m = 0..n_x/2 since the input
/// is real); the inverse carries the 1/n_x factor.
class NonlocalPlan {
 public:
  NonlocalPlan(const Grid& grid, const QuadratureWeights& weights, const SomaticKernel& kernel,
               const DendriticDelta& delta, double xi_0);

  int n_x() const { return n_x_; }
  int n_xi() const { return n_xi_; }
  double h_x() const { return h_x_; }
  const SomaticKernel& kernel() const { return kernel_; }
  const DendriticDelta& delta() const { return delta_; }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& w_samples() const { return w_samples_; }
  const std::vector<std::complex<double>>& w_hat() const { return w_hat_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& alpha_prime() const { return alpha_prime_; }
  const std::vector<double>& sigma() const { return sigma_; }
  double period() const { return 2.0 * L_x_; }

  /// Indices i with alpha_i != 0 (resp. alpha'_i != 0).
  const std::vector<int>& support_in() const { return support_in_; }
  const std::vector<int>& support_out() const { return support_out_; }
  bool compact() const { return compact_; }
  /// True when no support was sampled and N vanishes identically.
  bool vanishes() const { return support_in_.empty() || support_out_.empty(); }

  /// max_{i,i',m} |alpha_i alpha'_i' w_m|, the C_W of the boundedness estimate.
  double max_abs_W() const;

  /// Non-fatal diagnostics collected during construction (e.g. eps not
  /// resolved by h_xi).
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// out = h_x-free circular convolution (w_samples * r)_j = sum_j' w_{j-j'} r_j'.
  void convolve(std::span<const double> r, std::span<double> out) const;

 private:
  int n_x_;
  int n_xi_;
  double h_x_;
  double L_x_;
  SomaticKernel kernel_;
  DendriticDelta delta_;
  std::vector<double> x_nodes_;
  std::vector<double> w_samples_;
  std::vector<std::complex<double>> w_hat_;
  std::vector<double> alpha_;
  std::vector<double> alpha_prime_;
  std::vector<double> sigma_;
  std::vector<int> support_in_;
  std::vector<int> support_out_;
  bool compact_ = false;
  std::vector<std::string> warnings_;
  std::shared_ptr<const detail::CircularConvolver> convolver_;
};

NonlocalPlan build_plan(const Grid& grid, const QuadratureWeights& weights,
                        const SomaticKernel& kernel, const DendriticDelta& delta, double xi_0);

/// Literal quadruple-sum quadrature, O(n_x^2 n_xi^2). Reference oracle.
Eigen::MatrixXd eval_N_direct(const NonlocalPlan& plan, const FiringRate& rate,
                              const Eigen::MatrixXd& V);

/// Row reduction + FFT circular convolution + outer product.
Eigen::MatrixXd eval_N_fft(const NonlocalPlan& plan, const FiringRate& rate,
                           const Eigen::MatrixXd& V);
void eval_N_fft(const NonlocalPlan& plan, const FiringRate& rate, const Eigen::MatrixXd& V,
                Eigen::MatrixXd& out);

/// Same sum restricted to the support index sets of a compactly supported
/// delta. Rows outside support_in() are exactly zero. Throws ValidationError
/// for a plan whose delta has full support.
Eigen::MatrixXd eval_N_compact(const NonlocalPlan& plan, const FiringRate& rate,
                               const Eigen::MatrixXd& V);
void eval_N_compact(const NonlocalPlan& plan, const FiringRate& rate, const Eigen::MatrixXd& V,
                    Eigen::MatrixXd& out);

}  // namespace dendrofield
