#pragma once

#include <functional>
#include <vector>

// Independent reference computations for the tests. Nothing here calls into
// dendrofield; every quantity is rebuilt from the defining formulas.
namespace oracle {

using Dense = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting; solves M x = b.
std::vector<double> dense_solve(Dense M, std::vector<double> b);
Dense dense_inverse(const Dense& M);
double dense_inf_norm(const Dense& M);
Dense dense_matmul(const Dense& A, const Dense& B);

/// Neumann finite-difference second-derivative matrix on n nodes of spacing h.
Dense neumann_laplacian(int n, double h);
/// (1 + gamma tau) I - tau nu D.
Dense imex_matrix(int n, double h, double gamma, double nu, double tau);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(Dense M);

struct Field {
  int n_x = 0;
  int n_xi = 0;
  std::vector<double> v;  // v[i * n_x + j]
  double& at(int i, int j) { return v[i * n_x + j]; }
  double at(int i, int j) const { return v[i * n_x + j]; }
};

/// Literal quadruple sum of the discretised nonlocal term built from node
/// coordinates: x_j = -L_x + (j+1) h_x, xi_i = -L_xi + i h_xi, trapezium
/// weights, circle distance.
Field brute_force_N(int n_x, int n_xi, double L_x, double L_xi, double xi_0,
                    const std::function<double(double)>& w,
                    const std::function<double(double)>& delta,
                    const std::function<double(double)>& S, const Field& V);

/// Composite Simpson rule of f on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

/// Fourier transform of an even function: 2 int_0^L f(y) cos(p y) dy.
double even_fourier(const std::function<double(double)>& f, double p, double L, int panels);

double central_difference(const std::function<double(double)>& f, double x, double h);

/// Root of a decreasing function on [lo, hi] by plain bisection.
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol);

/// One dense IMEX step per column: A v_new = v + tau (N + G).
Field dense_imex_step(const Field& V, const Field& N, double h_xi, double gamma, double nu,
                      double tau);

}  // namespace oracle
