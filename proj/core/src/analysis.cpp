#include "dendrofield/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

double psi(double v, double nu, double gamma) {
  if (!(v > -gamma)) {
    std::ostringstream msg;
    msg << "psi: rate " << v << " must exceed -gamma = " << -gamma;
    throw ValidationError(msg.str());
  }
  return std::sqrt((gamma + v) / nu);
}

std::complex<double> psi(std::complex<double> lambda, double nu, double gamma) {
  return std::sqrt((gamma + lambda) / nu);
}

double speed_residual(double v, const FrontParams& fp) {
  const double s = psi(fp.decay_rate * v, fp.nu, fp.gamma);
  return fp.kappa * std::exp(-s * fp.xi_0) / (2.0 * s * fp.nu) - fp.theta;
}

double theoretical_wave_speed(const FrontParams& fp, double tol) {
  constexpr double kCap = 1e6;
  if (!(fp.decay_rate > 0.0)) throw ValidationError("decay_rate must be > 0");
  const double v_min = -fp.gamma / fp.decay_rate + tol;
  double lo = v_min;
  double hi = 1.0;
  while (speed_residual(hi, fp) > 0.0) {
    lo = hi;
    if (hi >= kCap) {
      std::ostringstream msg;
      msg << "no root of the speed equation on [" << v_min << ", " << kCap
          << "]; theta = " << fp.theta << " is too small";
      throw NumericalError(msg.str());
    }
    hi = std::min(2.0 * hi, kCap);
  }
  if (speed_residual(lo, fp) < 0.0)
    throw NumericalError("speed equation has no sign change above -gamma");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (speed_residual(mid, fp) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

LevelSetTrace track_level_set(const RowSeries& series, double theta) {
  LevelSetTrace trace;
  const auto& x = series.x;
  const std::size_t nx = x.size();
  for (std::size_t s = 0; s < series.rows.size(); ++s) {
    const auto& v = series.rows[s];
    double pos = std::numeric_limits<double>::quiet_NaN();
    // scan from the right so the first bracket found is the leading edge
    for (std::size_t j = nx - 1; j-- > 0;) {
      if (x[j] < 0.0) break;
      const double a = v[j] - theta;
      const double b = v[j + 1] - theta;
      if ((a >= 0.0 && b < 0.0) || (a < 0.0 && b >= 0.0)) {
        pos = x[j] + (x[j + 1] - x[j]) * a / (a - b);
        break;
      }
    }
    trace.times.push_back(series.times[s]);
    trace.positions.push_back(pos);
    trace.found.push_back(!std::isnan(pos));
  }
  return trace;
}

SpeedMeasurement measure_wave_speed(const RowSeries& series, double theta, double t_begin,
                                    double t_end) {
  SpeedMeasurement m;
  m.trace = track_level_set(series, theta);

  std::vector<double> t, xs;
  for (std::size_t s = 0; s < m.trace.times.size(); ++s) {
    const double ts = m.trace.times[s];
    if (ts < t_begin || ts > t_end || !m.trace.found[s]) continue;
    t.push_back(ts);
    xs.push_back(m.trace.positions[s]);
  }
  if (t.size() < 2) {
    std::ostringstream msg;
    msg << "no theta-crossing on [0, L_x] for t in [" << t_begin << ", " << t_end
        << "] (front not formed or escaped)";
    throw NumericalError(msg.str());
  }

  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double xm = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    stx += (t[k] - tm) * (xs[k] - xm);
  }
  m.speed = stx / stt;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = xs[k] - (xm + m.speed * (t[k] - tm));
    ss += r * r;
  }
  m.fit_residual = std::sqrt(ss / n);
  for (std::size_t k = 1; k < t.size(); ++k)
    m.pointwise_speeds.push_back((xs[k] - xs[k - 1]) / (t[k] - t[k - 1]));

  const double h = series.x.size() > 1 ? series.x[1] - series.x[0] : 0.0;
  m.residual_warning = m.fit_residual > 0.5 * h;
  return m;
}

std::complex<double> dispersion_value(const DispersionContext& ctx, std::complex<double> lambda,
                                      double p) {
  const double gamma = ctx.params.gamma;
  if (!(lambda.real() > -gamma)) {
    std::ostringstream msg;
    msg << "dispersion_value: Re(lambda) = " << lambda.real() << " must exceed -gamma";
    throw ValidationError(msg.str());
  }
  const std::complex<double> s = psi(lambda, ctx.params.nu, gamma);
  return 1.0 - ctx.slope0 * std::exp(-s * ctx.params.xi_0) / (2.0 * s * ctx.params.nu) *
                   kernel_fourier(ctx.kernel, p);
}

TuringThreshold static_turing_threshold(const PhysicalParams& params,
                                        const SomaticKernel& kernel) {
  params.validate();
  validate(kernel);
  TuringThreshold th;
  const double s0 = psi(0.0, params.nu, params.gamma);
  th.scaled_w_star = 2.0 * s0 * params.nu * std::exp(s0 * params.xi_0);

  auto w_hat = [&](double p) { return kernel_fourier(kernel, p); };

  // log-spaced scan over (0, 50] to bracket the largest sample
  constexpr int kScan = 2000;
  const double p_lo = 1e-6, p_hi = 50.0;
  std::vector<double> ps(kScan);
  for (int k = 0; k < kScan; ++k)
    ps[k] = p_lo * std::pow(p_hi / p_lo, static_cast<double>(k) / (kScan - 1));
  int best = 0;
  for (int k = 1; k < kScan; ++k)
    if (w_hat(ps[k]) > w_hat(ps[best])) best = k;

  double p_star = 0.0;
  if (best > 0 && best < kScan - 1) {
    // golden-section refinement on the bracketing interval
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = ps[best - 1], b = ps[best + 1];
    double c = b - g * (b - a), d = a + g * (b - a);
    while (b - a > 1e-10) {
      if (w_hat(c) > w_hat(d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - g * (b - a);
      d = a + g * (b - a);
    }
    p_star = 0.5 * (a + b);
  }
  if (p_star > 0.0 && w_hat(p_star) > w_hat(0.0)) {
    th.p_star = p_star;
    th.interior_peak = true;
  }
  th.w_hat_max = w_hat(th.p_star);
  th.critical_slope = th.w_hat_max > 0.0 ? th.scaled_w_star / th.w_hat_max
                                         : std::numeric_limits<double>::infinity();
  return th;
}

double growth_factor(const std::vector<double>& trace) {
  const std::size_t q = trace.size() / 4;
  if (q == 0) throw ValidationError("growth_factor: trace needs at least 4 samples");
  const double first = std::accumulate(trace.begin(), trace.begin() + q, 0.0) / q;
  const double last = std::accumulate(trace.end() - q, trace.end(), 0.0) / q;
  return last / first;
}

std::vector<TuringRun> turing_experiment(const PhysicalParams& params, const SomaticKernel& kernel,
                                         const std::vector<double>& betas,
                                         const TuringSettings& settings) {
  const TuringThreshold th = static_turing_threshold(params, kernel);
  if (!th.interior_peak)
    throw ValidationError("turing_experiment: kernel spectrum has no interior peak");
  const double p = th.p_star;

  SimulationConfig cfg;
  cfg.grid = GridSpec{settings.n_x, settings.n_xi, 4.0 * std::numbers::pi / p,
                      std::numbers::pi / p};
  cfg.model.params = params;
  cfg.model.kernel = kernel;
  cfg.model.delta = GaussianDelta{params.eps};
  cfg.initial = CosineInX{settings.amplitude, p};
  cfg.tau = settings.tau;
  cfg.n_t = static_cast<int>(std::lround(settings.t_final / settings.tau));
  cfg.row_stride = cfg.n_t + 1;  // rows not needed

  std::vector<TuringRun> out;
  for (double beta : betas) {
    cfg.model.rate = ShiftedSigmoid{beta};
    const RunRecord rec = run(cfg);
    TuringRun r;
    r.beta = beta;
    r.somatic_max = rec.somatic_max_trace;
    r.times.resize(r.somatic_max.size());
    for (std::size_t n = 0; n < r.times.size(); ++n) r.times[n] = n * cfg.tau;
    r.growth_factor = growth_factor(r.somatic_max);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dendrofield
