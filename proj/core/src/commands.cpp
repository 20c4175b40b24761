#include "dendrofield/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "dendrofield/error.hpp"
#include "dendrofield/snapshot_io.hpp"

namespace dendrofield {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_csv(const fs::path& path, const std::string& header) {
  std::ofstream os(path);
  if (!os) throw NumericalError("cannot write " + path.string());
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << header << "\n";
  return os;
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  std::ofstream os(dir / "config.resolved");
  if (!os) throw NumericalError("cannot write " + (dir / "config.resolved").string());
  os << write_config(config);
  return dir;
}

int steps_for(double t_final, double tau, const char* what) {
  const double n = t_final / tau;
  const long r = std::lround(n);
  if (r < 1 || std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw ValidationError(std::string(what) + ": t_final must be a positive multiple of tau");
  return static_cast<int>(r);
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

const Sigmoid& require_sigmoid(const RunConfig& config, const char* what) {
  const auto* s = std::get_if<Sigmoid>(&config.sim.model.rate);
  if (!s) throw ValidationError(std::string(what) + " needs firing_rate = sigmoid");
  return *s;
}

FrontParams front_params(const RunConfig& config, double theta, double decay_rate) {
  const auto* k = std::get_if<ExpDecay>(&config.sim.model.kernel);
  if (!k) throw ValidationError("wave speed needs kernel = exp_decay");
  const auto& p = config.sim.model.params;
  return FrontParams{theta, k->kappa, p.xi_0, p.gamma, p.nu, decay_rate};
}

SpeedMeasurement measure(SimulationConfig sim, double theta, double t0, double t1) {
  if (sim.n_t * sim.tau < t1 - 1e-12)
    throw ValidationError("wave speed: n_t * tau must reach fit_end");
  const RunRecord rec = run(sim);
  return measure_wave_speed(rec.somatic_rows, theta, t0, t1);
}

void set_eps(ModelSpec& model, double eps) {
  model.params.eps = eps;
  std::visit([&](auto& d) { d.eps = eps; }, model.delta);
}

int level_count(const RunConfig& config) {
  if (config.converge_levels.empty()) return 3;
  const double l = config.converge_levels.front();
  if (config.converge_levels.size() != 1 || l != std::floor(l) || l < 2)
    throw ValidationError("converge levels for tau/h axes must be one integer >= 2");
  return static_cast<int>(l);
}

ConvergeResult converge_tau(const RunConfig& config) {
  const int L = level_count(config);
  std::vector<Eigen::MatrixXd> finals;
  std::vector<double> taus;
  for (int k = 0; k <= L; ++k) {
    SimulationConfig sim = config.sim;
    sim.tau = config.sim.tau / std::ldexp(1.0, k);
    sim.n_t = steps_for(config.converge_t_final, sim.tau, "converge");
    sim.row_stride = sim.n_t + 1;
    sim.snapshot_stride = 0;
    finals.push_back(run(sim).final_state.values);
    taus.push_back(sim.tau);
  }
  ConvergeResult out{"tau", {}, kNaN};
  for (int k = 0; k < L; ++k) {
    ConvergeRow row{taus[k], max_abs_diff(finals[k], finals[L]),
                    max_abs_diff(finals[k], finals[k + 1]), kNaN};
    if (k > 0) row.order = std::log2(out.rows.back().increment / row.increment);
    out.rows.push_back(row);
  }
  return out;
}

/// Values of a level-k field at the nodes of the level-0 grid (n_x doubles,
/// n_xi - 1 doubles per level).
Eigen::MatrixXd restrict_to_coarse(const Eigen::MatrixXd& V, int k, int n_x0, int n_xi0) {
  const int f = 1 << k;
  Eigen::MatrixXd out(n_xi0, n_x0);
  for (int j = 0; j < n_x0; ++j)
    for (int i = 0; i < n_xi0; ++i) out(i, j) = V(i * f, (j + 1) * f - 1);
  return out;
}

std::vector<Eigen::MatrixXd> h_ladder(const RunConfig& config, int L, double tau, int first) {
  std::vector<Eigen::MatrixXd> out;
  const int n_x0 = config.sim.grid.n_x;
  const int n_xi0 = config.sim.grid.n_xi;
  for (int k = first; k <= L; ++k) {
    SimulationConfig sim = config.sim;
    sim.grid.n_x = n_x0 << k;
    sim.grid.n_xi = ((n_xi0 - 1) << k) + 1;
    sim.tau = tau;
    sim.n_t = steps_for(config.converge_t_final, tau, "converge");
    sim.row_stride = sim.n_t + 1;
    sim.snapshot_stride = 0;
    out.push_back(restrict_to_coarse(run(sim).final_state.values, k, n_x0, n_xi0));
  }
  return out;
}

ConvergeResult converge_h(const RunConfig& config) {
  const int L = level_count(config);
  const std::vector<Eigen::MatrixXd> V = h_ladder(config, L, config.sim.tau, 0);
  ConvergeResult out{"h", {}, kNaN};
  for (int k = 0; k < L; ++k) {
    ConvergeRow row{static_cast<double>(config.sim.grid.n_x << k), max_abs_diff(V[k], V[L]),
                    max_abs_diff(V[k], V[k + 1]), kNaN};
    if (k > 0) row.order = std::log2(out.rows.back().increment / row.increment);
    out.rows.push_back(row);
  }
  // temporal error must be subdominant: halve tau on the two finest levels
  const std::vector<Eigen::MatrixXd> W = h_ladder(config, L, 0.5 * config.sim.tau, L - 1);
  const double inc = out.rows.back().increment;
  out.tau_check = std::abs(max_abs_diff(W[0], W[1]) - inc) / inc;
  return out;
}

ConvergeResult converge_speed(const RunConfig& config) {
  if (config.converge_levels.empty())
    throw ValidationError("converge levels must list the eps or beta values");
  const Sigmoid base = require_sigmoid(config, "converge");
  const double theta = config.thetas.front();
  const double v_theory = theoretical_wave_speed(front_params(config, theta, 1.0));
  const double v_kernel = theoretical_wave_speed(front_params(config, theta, 0.5));
  ConvergeResult out{config.converge_axis, {}, kNaN};
  for (double level : config.converge_levels) {
    SimulationConfig sim = config.sim;
    Sigmoid rate = base;
    rate.theta = theta;
    if (config.converge_axis == "eps")
      set_eps(sim.model, level);
    else
      rate.beta = level;
    sim.model.rate = rate;
    sim.validate();
    const double v = measure(sim, theta, config.fit_start, config.fit_end).speed;
    out.rows.push_back({level, std::abs(v - v_theory), std::abs(v - v_kernel), kNaN});
  }
  return out;
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SimulateResult cmd_simulate(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output(config);
  SimulateResult res{run(config.sim), {dir / "config.resolved"}};
  const RunRecord& rec = res.record;

  std::vector<FieldState> snaps = rec.snapshots;
  if (config.sim.snapshot_stride == 0) snaps = {rec.final_state};
  write_snapshots(dir / "snapshots", make_snapshot_header(config.sim, snaps), snaps);
  res.files.push_back(dir / "snapshots.hdr");
  res.files.push_back(dir / "snapshots.bin");

  auto os = open_csv(dir / "trace.csv", "step,time,max_abs,inf_norm,somatic_max_abs");
  for (std::size_t n = 0; n < rec.max_abs_trace.size(); ++n)
    os << n << "," << n * config.sim.tau << "," << rec.max_abs_trace[n] << ","
       << rec.inf_norm_trace[n] << "," << rec.somatic_max_trace[n] << "\n";
  res.files.push_back(dir / "trace.csv");
  return res;
}

WaveSpeedResult cmd_wave_speed(const RunConfig& config) {
  config.validate();
  const Sigmoid base = require_sigmoid(config, "wave-speed");
  const fs::path dir = prepare_output(config);
  WaveSpeedResult res;
  for (double theta : config.thetas) {
    SimulationConfig sim = config.sim;
    Sigmoid rate = base;
    rate.theta = theta;
    sim.model.rate = rate;
    const SpeedMeasurement m = measure(sim, theta, config.fit_start, config.fit_end);
    WaveSpeedRow row;
    row.theta = theta;
    row.v_theory = theoretical_wave_speed(front_params(config, theta, 1.0));
    row.v_kernel = theoretical_wave_speed(front_params(config, theta, 0.5));
    row.v_measured = m.speed;
    row.fit_residual = m.fit_residual;
    row.residual_warning = m.residual_warning;
    if (m.residual_warning)
      res.warnings.push_back("theta = " + std::to_string(theta) +
                             ": level-set fit residual exceeds h_x/2");
    res.rows.push_back(row);
  }
  auto os = open_csv(dir / "wave_speed.csv",
                     "theta,v_theory,v_kernel,v_measured,fit_residual,residual_warning");
  for (const auto& r : res.rows)
    os << r.theta << "," << r.v_theory << "," << r.v_kernel << "," << r.v_measured << ","
       << r.fit_residual << "," << (r.residual_warning ? 1 : 0) << "\n";
  return res;
}

TuringResult cmd_turing(const RunConfig& config) {
  config.validate();
  if (!std::holds_alternative<MexicanHat>(config.sim.model.kernel))
    throw ValidationError("turing needs kernel = mexican_hat");
  const fs::path dir = prepare_output(config);
  const auto& params = config.sim.model.params;
  TuringResult res;
  res.threshold = static_turing_threshold(params, config.sim.model.kernel);
  res.slope0 = firing_rate_slope_at_zero(config.sim.model.rate);
  const double w_star = res.threshold.scaled_w_star / res.slope0;
  const double p_max = 3.0 * std::max(res.threshold.p_star, 1.0);
  constexpr int kSamples = 301;
  for (int k = 0; k < kSamples; ++k) {
    const double p = p_max * k / (kSamples - 1);
    res.p.push_back(p);
    res.margin.push_back(kernel_fourier(config.sim.model.kernel, p) - w_star);
  }
  {
    auto os = open_csv(dir / "turing_dispersion.csv", "p,w_hat_minus_w_star");
    for (int k = 0; k < kSamples; ++k) os << res.p[k] << "," << res.margin[k] << "\n";
  }

  std::vector<double> betas = config.betas;
  if (betas.empty()) {
    const double b = res.threshold.critical_beta_shifted_sigmoid();
    betas = {0.9 * b, 1.1 * b};
  }
  res.runs = turing_experiment(params, config.sim.model.kernel, betas, config.turing);
  auto os = open_csv(dir / "turing_growth.csv", "beta,growth_factor");
  for (const auto& r : res.runs) os << r.beta << "," << r.growth_factor << "\n";
  return res;
}

ConvergeResult cmd_converge(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output(config);
  ConvergeResult res;
  if (config.converge_axis == "tau")
    res = converge_tau(config);
  else if (config.converge_axis == "h")
    res = converge_h(config);
  else
    res = converge_speed(config);
  auto os = open_csv(dir / "converge.csv", "axis,level,error,increment,order");
  for (const auto& r : res.rows)
    os << res.axis << "," << r.level << "," << r.error << "," << r.increment << "," << r.order
       << "\n";
  if (res.axis == "h") os << "h,tau_check," << res.tau_check << ",,\n";
  return res;
}

BenchResult cmd_bench(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output(config);
  BenchResult res;

  SimulationConfig base = config.sim;
  base.check_bound = false;
  base.snapshot_stride = 0;
  base.row_stride = config.bench_steps + 1;
  base.grid.n_xi = config.bench_n_xi;

  auto time_per_step = [&](const SimulationConfig& sim, bool reference) {
    SimulationConfig empty = sim;
    empty.n_t = 0;
    auto go = [&](const SimulationConfig& s) {
      if (reference)
        run_reference(s);
      else
        run(s);
    };
    const double total = seconds([&] { go(sim); });
    const double init = seconds([&] { go(empty); });
    return std::max(total - init, 0.0) / sim.n_t;
  };

  for (Evaluator ev : {Evaluator::fft, Evaluator::compact}) {
    SimulationConfig sim = base;
    sim.evaluator = ev;
    sim.n_t = config.bench_steps;
    if (ev == Evaluator::compact && !has_compact_support(sim.model.delta))
      sim.model.delta = TruncatedGaussianDelta{sim.model.params.eps, 1.0};
    for (int n_x : config.bench_n_x) {
      sim.grid.n_x = n_x;
      BenchRow row{"matrix", to_string(ev), n_x, sim.grid.n_xi, run(sim).counters.flops_per_step,
                   time_per_step(sim, false),
                   working_set_values(Algorithm::matrix_form, n_x, sim.grid.n_xi)};
      res.rows.push_back(row);
    }
  }
  for (int n : config.bench_reference_sizes) {
    SimulationConfig sim = base;
    sim.grid.n_x = n;
    sim.grid.n_xi = n;
    sim.n_t = config.bench_steps;
    sim.evaluator = Evaluator::direct;
    BenchRow row{"vector", "direct", n, n, run_reference(sim).counters.flops_per_step,
                 time_per_step(sim, true), working_set_values(Algorithm::vector_form, n, n)};
    res.rows.push_back(row);
  }

  auto slope = [&](const std::string& algorithm, const std::string& evaluator, bool time) {
    std::vector<double> x, y;
    for (const auto& r : res.rows)
      if (r.algorithm == algorithm && r.evaluator == evaluator) {
        x.push_back(r.n_x);
        y.push_back(time ? r.seconds_per_step : static_cast<double>(r.flops_per_step));
      }
    return loglog_slope(x, y);
  };
  res.exponent_fft = slope("matrix", "fft", false);
  res.exponent_compact = slope("matrix", "compact", false);
  res.exponent_vector = slope("vector", "direct", false);
  res.time_exponent_fft = slope("matrix", "fft", true);
  res.time_exponent_vector = slope("vector", "direct", true);
  const int n_top = config.bench_n_x.back();
  res.working_set_ratio =
      static_cast<double>(working_set_values(Algorithm::vector_form, n_top, config.bench_n_xi)) /
      static_cast<double>(working_set_values(Algorithm::matrix_form, n_top, config.bench_n_xi));

  {
    auto os = open_csv(dir / "bench.csv",
                       "algorithm,evaluator,n_x,n_xi,flops_per_step,seconds_per_step,working_set");
    for (const auto& r : res.rows)
      os << r.algorithm << "," << r.evaluator << "," << r.n_x << "," << r.n_xi << ","
         << r.flops_per_step << "," << r.seconds_per_step << "," << r.working_set << "\n";
  }
  auto os = open_csv(dir / "bench_summary.csv", "quantity,value");
  os << "flops_exponent_fft," << res.exponent_fft << "\n"
     << "flops_exponent_compact," << res.exponent_compact << "\n"
     << "flops_exponent_vector," << res.exponent_vector << "\n"
     << "time_exponent_fft," << res.time_exponent_fft << "\n"
     << "time_exponent_vector," << res.time_exponent_vector << "\n"
     << "working_set_ratio," << res.working_set_ratio << "\n";
  return res;
}

void run_experiment(const RunConfig& config) {
  if (config.experiment == "simulate") {
    const auto res = cmd_simulate(config);
    for (const auto& w : res.record.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "steps " << res.record.counters.steps << ", final max |V| "
              << res.record.max_abs_trace.back() << "\n";
  } else if (config.experiment == "wave-speed") {
    const auto res = cmd_wave_speed(config);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& r : res.rows)
      std::cout << "theta " << r.theta << ": measured " << r.v_measured << ", theory "
                << r.v_theory << " (decay 1/2: " << r.v_kernel << ")\n";
  } else if (config.experiment == "turing") {
    const auto res = cmd_turing(config);
    std::cout << "p_* " << res.threshold.p_star << ", critical beta "
              << res.threshold.critical_beta_shifted_sigmoid() << "\n";
    for (const auto& r : res.runs)
      std::cout << "beta " << r.beta << ": growth factor " << r.growth_factor << "\n";
  } else if (config.experiment == "converge") {
    const auto res = cmd_converge(config);
    for (const auto& r : res.rows)
      std::cout << res.axis << " " << r.level << ": error " << r.error << ", order " << r.order
                << "\n";
    if (res.axis == "h") std::cout << "tau-halving change " << res.tau_check << "\n";
  } else {
    const auto res = cmd_bench(config);
    std::cout << "flops exponents: fft " << res.exponent_fft << ", compact "
              << res.exponent_compact << ", vector " << res.exponent_vector
              << "; working-set ratio " << res.working_set_ratio << "\n";
  }
}

}  // namespace dendrofield
