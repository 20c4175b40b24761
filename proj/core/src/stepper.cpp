#include "dendrofield/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double circle_offset(double x, double center, double period) {
  double d = std::fmod(std::abs(x - center), period);
  return std::min(d, period - d);
}

double gaussian_2d(double amplitude, double dx, double dxi, double wx, double wxi) {
  const double a = dx / wx;
  const double b = dxi / wxi;
  return amplitude * std::exp(-a * a - b * b);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void check_finite(const Eigen::MatrixXd& V, std::uint64_t step) {
  if (!V.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite voltage at step " << step;
    throw NumericalError(msg.str());
  }
}

double max_abs_row(const Eigen::MatrixXd& V, int row) { return V.row(row).cwiseAbs().maxCoeff(); }

}  // namespace

void validate(const ForcingSpec& forcing) {
  if (const auto* p = std::get_if<GaussianPulse>(&forcing)) {
    require(std::isfinite(p->amplitude), "forcing amplitude must be finite");
    require(p->width_x > 0.0, "forcing width_x must be > 0");
    require(p->width_xi > 0.0, "forcing width_xi must be > 0");
    require(p->t_off >= p->t_on, "forcing t_off must be >= t_on");
  }
}

void validate(const InitialCondition& initial) {
  std::visit(Overloaded{
                 [](const ZeroInitial&) {},
                 [](const ConstantInitial& c) {
                   require(std::isfinite(c.value), "initial value must be finite");
                 },
                 [](const CosineInX& c) {
                   require(std::isfinite(c.amplitude), "initial amplitude must be finite");
                   require(std::isfinite(c.wavenumber), "initial wavenumber must be finite");
                 },
                 [](const GaussianBump& g) {
                   require(std::isfinite(g.amplitude), "initial amplitude must be finite");
                   require(g.width_x > 0.0, "initial width_x must be > 0");
                   require(g.width_xi > 0.0, "initial width_xi must be > 0");
                 },
             },
             initial);
}

void eval_forcing(const ForcingSpec& forcing, const Grid& grid, double t, Eigen::MatrixXd& G) {
  G.setZero(grid.n_xi(), grid.n_x());
  const auto* p = std::get_if<GaussianPulse>(&forcing);
  if (p == nullptr || t < p->t_on || t >= p->t_off) return;
  const double period = 2.0 * grid.L_x();
  for (int j = 0; j < grid.n_x(); ++j) {
    const double dx = circle_offset(grid.x_nodes()[j], p->center_x, period);
    for (int i = 0; i < grid.n_xi(); ++i)
      G(i, j) = gaussian_2d(p->amplitude, dx, grid.xi_nodes()[i] - p->center_xi, p->width_x,
                            p->width_xi);
  }
}

double forcing_bound(const ForcingSpec& forcing) {
  if (const auto* p = std::get_if<GaussianPulse>(&forcing)) return std::abs(p->amplitude);
  return 0.0;
}

bool forcing_is_zero(const ForcingSpec& forcing) {
  return std::holds_alternative<NoForcing>(forcing) || forcing_bound(forcing) == 0.0;
}

Eigen::MatrixXd eval_initial(const InitialCondition& initial, const Grid& grid) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(grid.n_xi(), grid.n_x());
  const auto& x = grid.x_nodes();
  const auto& xi = grid.xi_nodes();
  std::visit(Overloaded{
                 [](const ZeroInitial&) {},
                 [&](const ConstantInitial& c) { V.setConstant(c.value); },
                 [&](const CosineInX& c) {
                   for (int j = 0; j < grid.n_x(); ++j)
                     V.col(j).setConstant(c.amplitude * std::cos(c.wavenumber * x[j]));
                 },
                 [&](const GaussianBump& g) {
                   const double period = 2.0 * grid.L_x();
                   for (int j = 0; j < grid.n_x(); ++j) {
                     const double dx = circle_offset(x[j], g.center_x, period);
                     for (int i = 0; i < grid.n_xi(); ++i)
                       V(i, j) = gaussian_2d(g.amplitude, dx, xi[i] - g.center_xi, g.width_x,
                                             g.width_xi);
                   }
                 },
             },
             initial);
  return V;
}

std::string to_string(Evaluator e) {
  switch (e) {
    case Evaluator::fft:
      return "fft";
    case Evaluator::direct:
      return "direct";
    case Evaluator::compact:
      return "compact";
  }
  return "fft";
}

Evaluator parse_evaluator(const std::string& s) {
  if (s == "fft") return Evaluator::fft;
  if (s == "direct") return Evaluator::direct;
  if (s == "compact") return Evaluator::compact;
  throw ValidationError("evaluator must be one of fft, direct, compact (got '" + s + "')");
}

void SimulationConfig::validate() const {
  // Grid's constructor carries the grid preconditions
  Grid(grid.n_x, grid.n_xi, grid.L_x, grid.L_xi);
  model.validate();
  dendrofield::validate(forcing);
  dendrofield::validate(initial);
  require(std::isfinite(tau) && tau > 0.0, "tau must be > 0");
  require(n_t >= 0, "n_t must be >= 0");
  require(snapshot_stride >= 0, "snapshot_stride must be >= 0");
  require(row_stride >= 1, "row_stride must be >= 1");
  if (evaluator == Evaluator::compact)
    require(has_compact_support(model.delta),
            "evaluator = compact requires delta = truncated_gaussian");
}

// ---- operation accounting -------------------------------------------------

std::uint64_t fft_flops(int n) {
  if (n <= 1) return 0;
  return static_cast<std::uint64_t>(std::llround(5.0 * n * std::log2(static_cast<double>(n))));
}

std::uint64_t init_flops_matrix_form(int n_x, int n_xi) {
  const std::uint64_t nx = n_x, nxi = n_xi;
  return (nxi + nx)                    // grid vectors
         + (2 * nx + fft_flops(n_x))   // w and its spectrum
         + 2 * nxi                     // alpha, alpha'
         + nxi                         // sigma
         + (2 * nxi - 1);              // LU of A
}

std::uint64_t init_flops_vector_form(int n_x, int n_xi) {
  const std::uint64_t nx = n_x, nxi = n_xi, n = nx * nxi;
  return (nxi + nx) + nx + 2 * nxi + (nxi + nx) + (2 * n - 1);
}

std::uint64_t step_flops_matrix_form(int n_x, int n_xi, Evaluator evaluator, int support_in,
                                     int support_out) {
  const std::uint64_t nx = n_x, nxi = n_xi, n = nx * nxi;
  const std::uint64_t copy_and_forcing = 2 * n;
  const std::uint64_t solve = 5 * n - 4 * nx;
  switch (evaluator) {
    case Evaluator::fft:
      // z = F[(alpha' o sigma)^T S(V)], then N = h_x alpha F^-1[w_hat o z]
      return copy_and_forcing + (3 * n + fft_flops(n_x) + nxi - nx) +
             (n + fft_flops(n_x) + 2 * nx) + solve;
    case Evaluator::compact:
      return copy_and_forcing +
             (2 * static_cast<std::uint64_t>(support_in) + support_out) * nx +
             2 * fft_flops(n_x) + solve;
    case Evaluator::direct:
      return copy_and_forcing + (2 * n * n - n) + solve;
  }
  return 0;
}

std::uint64_t step_flops_vector_form(int n_x, int n_xi) {
  const std::uint64_t n = static_cast<std::uint64_t>(n_x) * n_xi;
  return 2 * n + (2 * n * n - n) + (5 * n - 4);
}

std::uint64_t working_set_values(Algorithm algorithm, int n_x, int n_xi) {
  const std::uint64_t nx = n_x, nxi = n_xi, n = nx * nxi;
  switch (algorithm) {
    case Algorithm::matrix_form:
      // xi, alpha, alpha', three LU diagonals, z | x, w, sigma | V, V^n, G, N
      return 7 * nxi + 3 * nx + 4 * n;
    case Algorithm::vector_form:
      // xi, rho, alpha, alpha' | x, sigma, w | U^n, Z, N, G and three LU diagonals
      return 2 * nxi + 2 * nx + 7 * n;
  }
  return 0;
}

// ---- stepping -------------------------------------------------------------

double matrix_inf_norm(const Eigen::MatrixXd& V) {
  if (V.size() == 0) return 0.0;
  return V.cwiseAbs().rowwise().sum().maxCoeff();
}

double lemma1_bound(double V0_norm, const PhysicalParams& params, const Grid& grid, double C_W,
                    double C_S, double C_G) {
  return V0_norm + grid.n_x() * (grid.measure() * C_W * C_S + C_G) / params.gamma;
}

namespace {

void eval_N(const NonlocalPlan& plan, const FiringRate& rate, const Eigen::MatrixXd& V,
            Evaluator evaluator, Eigen::MatrixXd& N) {
  switch (evaluator) {
    case Evaluator::fft:
      eval_N_fft(plan, rate, V, N);
      return;
    case Evaluator::compact:
      eval_N_compact(plan, rate, V, N);
      return;
    case Evaluator::direct:
      N = eval_N_direct(plan, rate, V);
      return;
  }
}

}  // namespace

FieldState imex_step(const TridiagFactorization& F, const NonlocalPlan& plan,
                     const FiringRate& rate, const Eigen::MatrixXd& G_prev,
                     const FieldState& V_prev, double tau, Evaluator evaluator) {
  if (G_prev.rows() != V_prev.values.rows() || G_prev.cols() != V_prev.values.cols())
    throw ValidationError("imex_step: forcing and field dimensions differ");
  Eigen::MatrixXd N;
  eval_N(plan, rate, V_prev.values, evaluator, N);
  FieldState next{V_prev.values + tau * (N + G_prev), V_prev.time + tau};
  solve_in_place(F, next.values);
  return next;
}

RunRecord run(const SimulationConfig& config) {
  config.validate();
  const ModelSpec& model = config.model;
  const Grid grid = build_grid(config.grid.n_x, config.grid.n_xi, config.grid.L_x, config.grid.L_xi);
  const QuadratureWeights weights = build_weights(grid);

  // initialisation: synaptic vectors, weights, LU of A
  const NonlocalPlan plan =
      build_plan(grid, weights, model.kernel, model.delta, model.params.xi_0);
  const TridiagonalMatrix D = build_laplacian(grid);
  const TridiagFactorization F =
      factorize(build_A(D, model.params.gamma, model.params.nu, config.tau));

  RunRecord rec{grid, {}, {}, {}, {}, {}, {}, 0, {}, 0.0, plan.warnings()};
  rec.somatic_row = grid.nearest_xi_index(0.0);
  rec.somatic_rows.x = grid.x_nodes();
  rec.somatic_rows.L_x = grid.L_x();

  const int support_in = static_cast<int>(plan.support_in().size());
  const int support_out = static_cast<int>(plan.support_out().size());
  rec.counters.flops_init = init_flops_matrix_form(grid.n_x(), grid.n_xi());
  rec.counters.flops_per_step =
      step_flops_matrix_form(grid.n_x(), grid.n_xi(), config.evaluator, support_in, support_out);
  rec.counters.fft_count = 1;  // spectrum of w

  FieldState state{eval_initial(config.initial, grid), 0.0};
  check_finite(state.values, 0);
  rec.bound = lemma1_bound(matrix_inf_norm(state.values), model.params, grid, plan.max_abs_W(),
                           firing_rate_bound(model.rate), forcing_bound(config.forcing));

  const bool null_forcing = forcing_is_zero(config.forcing);
  auto record = [&](std::uint64_t n) {
    const double inf_norm = matrix_inf_norm(state.values);
    rec.max_abs_trace.push_back(state.values.cwiseAbs().maxCoeff());
    rec.inf_norm_trace.push_back(inf_norm);
    rec.somatic_max_trace.push_back(max_abs_row(state.values, rec.somatic_row));
    if (n % config.row_stride == 0) {
      rec.somatic_rows.times.push_back(state.time);
      const Eigen::VectorXd row = state.values.row(rec.somatic_row).transpose();
      rec.somatic_rows.rows.emplace_back(row.data(), row.data() + row.size());
    }
    if (config.snapshot_stride > 0 && n % config.snapshot_stride == 0) rec.snapshots.push_back(state);
    if (config.check_bound && inf_norm > rec.bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "boundedness estimate violated at step " << n << ": |V|_inf = " << inf_norm
          << " > " << rec.bound;
      throw NumericalError(msg.str());
    }
  };
  record(0);

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(grid.n_xi(), grid.n_x());
  Eigen::MatrixXd N(grid.n_xi(), grid.n_x());
  for (int n = 1; n <= config.n_t; ++n) {
    if (!null_forcing) eval_forcing(config.forcing, grid, state.time, G);
    eval_N(plan, model.rate, state.values, config.evaluator, N);
    state.values += config.tau * (N + G);
    solve_in_place(F, state.values);
    state.time = n * config.tau;
    check_finite(state.values, n);

    ++rec.counters.steps;
    rec.counters.flops_steps_total += rec.counters.flops_per_step;
    rec.counters.linear_solve_count += grid.n_x();
    if (config.evaluator != Evaluator::direct) rec.counters.fft_count += 2;
    record(n);
  }
  rec.final_state = std::move(state);
  return rec;
}

}  // namespace dendrofield
