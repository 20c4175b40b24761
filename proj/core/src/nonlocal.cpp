#include "dendrofield/nonlocal.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace detail {

/// Real-to-complex / complex-to-real FFTW plans of one length with the kernel
/// spectrum baked in. Planning is serialised (FFTW's planner is not
/// reentrant); execution uses the new-array interface and is reentrant.
class CircularConvolver {
 public:
  explicit CircularConvolver(std::span<const double> generator)
      : n_(static_cast<int>(generator.size())), spectrum_(n_ / 2 + 1) {
    std::vector<double> in(generator.begin(), generator.end());
    std::vector<std::complex<double>> out(n_ / 2 + 1);
    {
      std::lock_guard lock(planner_mutex());
      // ESTIMATE keeps plan selection (and hence rounding) deterministic
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      forward_ = fftw_plan_dft_r2c_1d(n_, in.data(), as_fftw(out.data()), flags);
      inverse_ = fftw_plan_dft_c2r_1d(n_, as_fftw(out.data()), in.data(), flags | FFTW_DESTROY_INPUT);
    }
    if (forward_ == nullptr || inverse_ == nullptr) throw NumericalError("FFTW planning failed");
    fftw_execute_dft_r2c(forward_, in.data(), as_fftw(spectrum_.data()));
  }

  ~CircularConvolver() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  CircularConvolver(const CircularConvolver&) = delete;
  CircularConvolver& operator=(const CircularConvolver&) = delete;

  const std::vector<std::complex<double>>& spectrum() const { return spectrum_; }

  void convolve(std::span<const double> r, std::span<double> out) const {
    std::vector<double> in(r.begin(), r.end());
    std::vector<std::complex<double>> z(n_ / 2 + 1);
    fftw_execute_dft_r2c(forward_, in.data(), as_fftw(z.data()));
    for (std::size_t k = 0; k < z.size(); ++k) z[k] *= spectrum_[k];
    fftw_execute_dft_c2r(inverse_, as_fftw(z.data()), out.data());
    const double scale = 1.0 / n_;
    for (double& v : out) v *= scale;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  static fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

  int n_;
  std::vector<std::complex<double>> spectrum_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace detail

NonlocalPlan::NonlocalPlan(const Grid& grid, const QuadratureWeights& weights,
                           const SomaticKernel& kernel, const DendriticDelta& delta, double xi_0)
    : n_x_(grid.n_x()),
      n_xi_(grid.n_xi()),
      h_x_(grid.h_x()),
      L_x_(grid.L_x()),
      kernel_(kernel),
      delta_(delta),
      x_nodes_(grid.x_nodes()),
      sigma_(weights.sigma) {
  validate(kernel);
  validate(delta);
  if (static_cast<int>(weights.sigma.size()) != n_xi_ ||
      static_cast<int>(weights.rho.size()) != n_x_)
    throw ValidationError("build_plan: quadrature weights do not match the grid");

  // generator of the circulant: kernel at wrapped displacement m h_x
  w_samples_.resize(n_x_);
  const double ref = grid.x_nodes().back();
  for (int m = 0; m < n_x_; ++m) {
    const double xm = m == 0 ? ref : grid.x_nodes()[m - 1];
    w_samples_[m] = eval_kernel(kernel, wrapped_distance(grid, xm, ref));
  }

  alpha_.resize(n_xi_);
  alpha_prime_.resize(n_xi_);
  for (int i = 0; i < n_xi_; ++i) {
    const double xi = grid.xi_nodes()[i];
    alpha_[i] = eval_delta(delta, xi - xi_0);
    alpha_prime_[i] = eval_delta(delta, xi);
    if (alpha_[i] != 0.0) support_in_.push_back(i);
    if (alpha_prime_[i] != 0.0) support_out_.push_back(i);
  }
  compact_ = has_compact_support(delta);

  const double eps = delta_width(delta);
  if (grid.h_xi() > eps) {
    std::ostringstream msg;
    msg << "dendritic spacing h_xi = " << grid.h_xi() << " exceeds eps = " << eps
        << "; the delta profile is not resolved";
    warnings_.push_back(msg.str());
  }
  if (vanishes())
    warnings_.push_back("no dendritic node samples the delta support; N vanishes identically");

  convolver_ = std::make_shared<const detail::CircularConvolver>(w_samples_);
  w_hat_ = convolver_->spectrum();
}

double NonlocalPlan::max_abs_W() const {
  double a = 0.0, ap = 0.0, w = 0.0;
  for (double v : alpha_) a = std::max(a, std::abs(v));
  for (double v : alpha_prime_) ap = std::max(ap, std::abs(v));
  for (double v : w_samples_) w = std::max(w, std::abs(v));
  return a * ap * w;
}

void NonlocalPlan::convolve(std::span<const double> r, std::span<double> out) const {
  if (static_cast<int>(r.size()) != n_x_ || static_cast<int>(out.size()) != n_x_)
    throw ValidationError("convolve: expected vectors of length n_x");
  convolver_->convolve(r, out);
}

NonlocalPlan build_plan(const Grid& grid, const QuadratureWeights& weights,
                        const SomaticKernel& kernel, const DendriticDelta& delta, double xi_0) {
  return NonlocalPlan(grid, weights, kernel, delta, xi_0);
}

namespace {

void check_dims(const NonlocalPlan& plan, const Eigen::MatrixXd& V) {
  if (V.rows() != plan.n_xi() || V.cols() != plan.n_x()) {
    std::ostringstream msg;
    msg << "field is " << V.rows() << "x" << V.cols() << ", grid is " << plan.n_xi() << "x"
        << plan.n_x();
    throw ValidationError(msg.str());
  }
}

}  // namespace

Eigen::MatrixXd eval_N_direct(const NonlocalPlan& plan, const FiringRate& rate,
                              const Eigen::MatrixXd& V) {
  check_dims(plan, V);
  const int nx = plan.n_x();
  const int nxi = plan.n_xi();
  const auto& x = plan.x_nodes();
  const double period = plan.period();

  Eigen::MatrixXd S(nxi, nx);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nxi; ++i) S(i, j) = eval_firing_rate(rate, V(i, j));

  // w(|x_j - x_j'|) on the periodic domain, evaluated from the node coordinates
  Eigen::MatrixXd w(nx, nx);
  for (int j = 0; j < nx; ++j)
    for (int jp = 0; jp < nx; ++jp) {
      double d = std::fmod(std::abs(x[j] - x[jp]), period);
      d = std::min(d, period - d);
      w(j, jp) = eval_kernel(plan.kernel(), d);
    }

  const auto& alpha = plan.alpha();
  const auto& alpha_p = plan.alpha_prime();
  const auto& sigma = plan.sigma();
  const double rho = plan.h_x();

  Eigen::MatrixXd N(nxi, nx);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nxi; ++i) {
      double sum = 0.0;
      for (int jp = 0; jp < nx; ++jp)
        for (int ip = 0; ip < nxi; ++ip)
          sum += alpha[i] * alpha_p[ip] * w(j, jp) * S(ip, jp) * rho * sigma[ip];
      N(i, j) = sum;
    }
  return N;
}

void eval_N_fft(const NonlocalPlan& plan, const FiringRate& rate, const Eigen::MatrixXd& V,
                Eigen::MatrixXd& out) {
  check_dims(plan, V);
  const int nx = plan.n_x();
  const int nxi = plan.n_xi();
  const auto& alpha_p = plan.alpha_prime();
  const auto& sigma = plan.sigma();

  std::vector<double> r(nx), conv(nx);
  for (int j = 0; j < nx; ++j) {
    double s = 0.0;
    for (int i = 0; i < nxi; ++i) s += alpha_p[i] * sigma[i] * eval_firing_rate(rate, V(i, j));
    r[j] = s;
  }
  plan.convolve(r, conv);

  out.resize(nxi, nx);
  const auto& alpha = plan.alpha();
  const double hx = plan.h_x();
  for (int j = 0; j < nx; ++j) {
    const double c = hx * conv[j];
    for (int i = 0; i < nxi; ++i) out(i, j) = alpha[i] * c;
  }
}

Eigen::MatrixXd eval_N_fft(const NonlocalPlan& plan, const FiringRate& rate,
                           const Eigen::MatrixXd& V) {
  Eigen::MatrixXd out;
  eval_N_fft(plan, rate, V, out);
  return out;
}

void eval_N_compact(const NonlocalPlan& plan, const FiringRate& rate, const Eigen::MatrixXd& V,
                    Eigen::MatrixXd& out) {
  if (!plan.compact())
    throw ValidationError("eval_N_compact requires a compactly supported dendritic delta");
  check_dims(plan, V);
  const int nx = plan.n_x();
  out.setZero(plan.n_xi(), nx);
  if (plan.vanishes()) return;

  const auto& alpha_p = plan.alpha_prime();
  const auto& sigma = plan.sigma();
  std::vector<double> r(nx), conv(nx);
  for (int j = 0; j < nx; ++j) {
    double s = 0.0;
    for (int i : plan.support_out()) s += alpha_p[i] * sigma[i] * eval_firing_rate(rate, V(i, j));
    r[j] = s;
  }
  plan.convolve(r, conv);

  const auto& alpha = plan.alpha();
  const double hx = plan.h_x();
  for (int j = 0; j < nx; ++j) {
    const double c = hx * conv[j];
    for (int i : plan.support_in()) out(i, j) = alpha[i] * c;
  }
}

Eigen::MatrixXd eval_N_compact(const NonlocalPlan& plan, const FiringRate& rate,
                               const Eigen::MatrixXd& V) {
  Eigen::MatrixXd out;
  eval_N_compact(plan, rate, V, out);
  return out;
}

}  // namespace dendrofield
