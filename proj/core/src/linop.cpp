#include "dendrofield/linop.hpp"

#include <cmath>
#include <string>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

constexpr double kPivotGuard = 1e-14;

}  // namespace

std::vector<double> TridiagonalMatrix::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw ValidationError("tridiagonal multiply: dimension mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = main[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

Eigen::MatrixXd TridiagonalMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, i) = main[i];
    if (i + 1 < n) {
      M(i, i + 1) = upper[i];
      M(i + 1, i) = lower[i];
    }
  }
  return M;
}

TridiagonalMatrix build_laplacian(const Grid& grid) {
  const int n = grid.n_xi();
  const double s = 1.0 / (grid.h_xi() * grid.h_xi());
  TridiagonalMatrix D;
  D.main.assign(n, -2.0 * s);
  D.lower.assign(n - 1, s);
  D.upper.assign(n - 1, s);
  // Neumann rows: ghost node mirrored into the first/last off-diagonal
  D.upper.front() = 2.0 * s;
  D.lower.back() = 2.0 * s;
  return D;
}

TridiagonalMatrix build_A(const TridiagonalMatrix& D, double gamma, double nu, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be > 0");
  const double c = tau * nu;
  TridiagonalMatrix A;
  A.main.resize(D.main.size());
  A.lower.resize(D.lower.size());
  A.upper.resize(D.upper.size());
  for (std::size_t i = 0; i < D.main.size(); ++i) A.main[i] = (1.0 + gamma * tau) - c * D.main[i];
  for (std::size_t i = 0; i < D.lower.size(); ++i) {
    A.lower[i] = -c * D.lower[i];
    A.upper[i] = -c * D.upper[i];
  }
  return A;
}

TridiagFactorization factorize(const TridiagonalMatrix& A) {
  const std::size_t n = A.size();
  if (n == 0 || A.lower.size() + 1 != n || A.upper.size() + 1 != n)
    throw ValidationError("factorize: inconsistent tridiagonal dimensions");

  TridiagFactorization F;
  F.l_.resize(n - 1);
  F.u_.resize(n);
  F.super_ = A.upper;

  auto check_pivot = [&](std::size_t i) {
    if (!(std::abs(F.u_[i]) >= kPivotGuard))
      throw NumericalError("factorize: singular pivot at row " + std::to_string(i));
  };
  F.u_[0] = A.main[0];
  check_pivot(0);
  for (std::size_t i = 1; i < n; ++i) {
    F.l_[i - 1] = A.lower[i - 1] / F.u_[i - 1];
    F.u_[i] = A.main[i] - F.l_[i - 1] * A.upper[i - 1];
    check_pivot(i);
  }
  return F;
}

void TridiagFactorization::solve(std::span<double> b) const {
  const std::size_t n = u_.size();
  for (std::size_t i = 1; i < n; ++i) b[i] -= l_[i - 1] * b[i - 1];
  b[n - 1] /= u_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - super_[i] * b[i + 1]) / u_[i];
}

void solve_in_place(const TridiagFactorization& F, Eigen::Ref<Eigen::MatrixXd> B) {
  if (static_cast<std::size_t>(B.rows()) != F.size())
    throw ValidationError("solve_in_place: right-hand side has " + std::to_string(B.rows()) +
                          " rows, expected " + std::to_string(F.size()));
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    F.solve(std::span<double>(B.col(j).data(), static_cast<std::size_t>(B.rows())));
}

double inverse_inf_norm_bound(double gamma, double tau) { return 1.0 / (1.0 + gamma * tau); }

}  // namespace dendrofield
