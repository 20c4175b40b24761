// Vector-form stepper: the n_x n_xi unknowns are flattened (k = j n_xi + i),
// the implicit operator is assembled as a sparse Kronecker product and
// factorised with a general sparse LU, and N comes from the literal
// quadrature. Shares no solver or convolution code with run().

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <sstream>

#include "dendrofield/error.hpp"
#include "dendrofield/stepper.hpp"

namespace dendrofield {

namespace {

Eigen::SparseMatrix<double> kronecker_system(const TridiagonalMatrix& D, int n_x, double gamma,
                                             double nu, double tau) {
  const int nxi = static_cast<int>(D.size());
  const Eigen::Index n = static_cast<Eigen::Index>(n_x) * nxi;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  for (int j = 0; j < n_x; ++j) {
    const Eigen::Index off = static_cast<Eigen::Index>(j) * nxi;
    for (int i = 0; i < nxi; ++i) {
      entries.emplace_back(off + i, off + i, (1.0 + tau * gamma) - tau * nu * D.main[i]);
      if (i + 1 < nxi) {
        entries.emplace_back(off + i, off + i + 1, -tau * nu * D.upper[i]);
        entries.emplace_back(off + i + 1, off + i, -tau * nu * D.lower[i]);
      }
    }
  }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(entries.begin(), entries.end());
  M.makeCompressed();
  return M;
}

}  // namespace

RunRecord run_reference(const SimulationConfig& config, int max_unknowns) {
  config.validate();
  if (static_cast<long>(config.grid.n_x) * config.grid.n_xi > max_unknowns) {
    std::ostringstream msg;
    msg << "run_reference: grid " << config.grid.n_xi << "x" << config.grid.n_x
        << " exceeds the cap of " << max_unknowns << " unknowns";
    throw ValidationError(msg.str());
  }
  const ModelSpec& model = config.model;
  const Grid grid = build_grid(config.grid.n_x, config.grid.n_xi, config.grid.L_x, config.grid.L_xi);
  const QuadratureWeights weights = build_weights(grid);
  const NonlocalPlan plan =
      build_plan(grid, weights, model.kernel, model.delta, model.params.xi_0);

  const Eigen::SparseMatrix<double> M = kronecker_system(
      build_laplacian(grid), grid.n_x(), model.params.gamma, model.params.nu, config.tau);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw NumericalError("run_reference: sparse LU failed");

  RunRecord rec{grid, {}, {}, {}, {}, {}, {}, 0, {}, 0.0, plan.warnings()};
  rec.somatic_row = grid.nearest_xi_index(0.0);
  rec.somatic_rows.x = grid.x_nodes();
  rec.somatic_rows.L_x = grid.L_x();
  rec.counters.flops_init = init_flops_vector_form(grid.n_x(), grid.n_xi());
  rec.counters.flops_per_step = step_flops_vector_form(grid.n_x(), grid.n_xi());

  const Eigen::Index n_xi = grid.n_xi(), n_x = grid.n_x(), n = n_xi * n_x;
  Eigen::VectorXd U = eval_initial(config.initial, grid).reshaped();
  auto as_matrix = [&](const Eigen::VectorXd& u) {
    return Eigen::MatrixXd(u.reshaped(n_xi, n_x));
  };
  rec.bound = lemma1_bound(matrix_inf_norm(as_matrix(U)), model.params, grid, plan.max_abs_W(),
                           firing_rate_bound(model.rate), forcing_bound(config.forcing));

  double time = 0.0;
  auto record = [&](int step) {
    const Eigen::MatrixXd V = as_matrix(U);
    rec.max_abs_trace.push_back(V.cwiseAbs().maxCoeff());
    rec.inf_norm_trace.push_back(matrix_inf_norm(V));
    rec.somatic_max_trace.push_back(V.row(rec.somatic_row).cwiseAbs().maxCoeff());
    if (step % config.row_stride == 0) {
      rec.somatic_rows.times.push_back(time);
      const Eigen::VectorXd row = V.row(rec.somatic_row).transpose();
      rec.somatic_rows.rows.emplace_back(row.data(), row.data() + row.size());
    }
    if (config.snapshot_stride > 0 && step % config.snapshot_stride == 0)
      rec.snapshots.push_back(FieldState{V, time});
  };
  record(0);

  Eigen::MatrixXd G;
  Eigen::VectorXd Z(n);
  for (int step = 1; step <= config.n_t; ++step) {
    eval_forcing(config.forcing, grid, time, G);
    const Eigen::MatrixXd N = eval_N_direct(plan, model.rate, as_matrix(U));
    Z = U + config.tau * (N.reshaped() + G.reshaped());
    U = lu.solve(Z);
    if (!U.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite voltage at step " << step;
      throw NumericalError(msg.str());
    }
    time = step * config.tau;
    ++rec.counters.steps;
    rec.counters.flops_steps_total += rec.counters.flops_per_step;
    ++rec.counters.linear_solve_count;
    record(step);
  }
  rec.final_state = FieldState{as_matrix(U), time};
  return rec;
}

}  // namespace dendrofield
