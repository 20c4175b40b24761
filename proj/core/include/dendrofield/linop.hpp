#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dendrofield/grid.hpp"

namespace dendrofield {

/// Tridiagonal n x n matrix: lower[i] = M(i+1, i), main[i] = M(i, i),
/// upper[i] = M(i, i+1).
struct TridiagonalMatrix {
  std::vector<double> lower;
  std::vector<double> main;
  std::vector<double> upper;

  std::size_t size() const { return main.size(); }
  /// y = M x.
  std::vector<double> multiply(std::span<const double> x) const;
  Eigen::MatrixXd to_dense() const;
};

/// D_xixi = Delta / h_xi^2 with the Neumann rows (-2, 2) and (2, -2) built in.
TridiagonalMatrix build_laplacian(const Grid& grid);

/// A = (1 + gamma tau) I - tau nu D.
TridiagonalMatrix build_A(const TridiagonalMatrix& D, double gamma, double nu, double tau);

/// LU factors of a tridiagonal matrix without pivoting: L is unit lower
/// bidiagonal (subdiagonal l), U is upper bidiagonal (diagonal u, superdiagonal
/// upper of the original matrix).
class TridiagFactorization {
 public:
  std::size_t size() const { return u_.size(); }
  const std::vector<double>& l() const { return l_; }
  const std::vector<double>& u_diag() const { return u_; }
  const std::vector<double>& u_super() const { return super_; }

  /// Forward then backward substitution on one column, in place.
  void solve(std::span<double> b) const;

 private:
  friend TridiagFactorization factorize(const TridiagonalMatrix& A);
  std::vector<double> l_;
  std::vector<double> u_;
  std::vector<double> super_;
};

/// Throws NumericalError if a pivot falls below 1e-14 in magnitude.
TridiagFactorization factorize(const TridiagonalMatrix& A);

/// Solves A X = B column by column, overwriting B. B must have n_xi rows.
void solve_in_place(const TridiagFactorization& F, Eigen::Ref<Eigen::MatrixXd> B);

/// 1 / (1 + gamma tau): bound on |A^{-1}|_inf from strict row dominance.
double inverse_inf_norm_bound(double gamma, double tau);

}  // namespace dendrofield
