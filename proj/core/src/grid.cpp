#include "dendrofield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

Grid::Grid(int n_x, int n_xi, double L_x, double L_xi)
    : n_x_(n_x), n_xi_(n_xi), L_x_(L_x), L_xi_(L_xi) {
  require(n_x >= 2, "n_x must be >= 2");
  require(n_xi >= 3, "n_xi must be >= 3");
  require(std::isfinite(L_x) && L_x > 0.0, "L_x must be > 0");
  require(std::isfinite(L_xi) && L_xi > 0.0, "L_xi must be > 0");

  h_x_ = 2.0 * L_x / n_x;
  h_xi_ = 2.0 * L_xi / (n_xi - 1);

  x_nodes_.resize(n_x);
  for (int j = 0; j < n_x; ++j) x_nodes_[j] = -L_x + (j + 1) * h_x_;
  xi_nodes_.resize(n_xi);
  for (int i = 0; i < n_xi; ++i) xi_nodes_[i] = -L_xi + i * h_xi_;
  // pin the endpoints so they are exact rather than accumulated
  x_nodes_.back() = L_x;
  xi_nodes_.front() = -L_xi;
  xi_nodes_.back() = L_xi;
}

int Grid::nearest_xi_index(double xi) const {
  const double s = (xi + L_xi_) / h_xi_;
  long i = std::lround(s);
  if (std::abs(s - std::floor(s) - 0.5) < 1e-12) i = static_cast<long>(std::floor(s));
  if (i < 0) i = 0;
  if (i > n_xi_ - 1) i = n_xi_ - 1;
  return static_cast<int>(i);
}

Grid build_grid(int n_x, int n_xi, double L_x, double L_xi) {
  return Grid(n_x, n_xi, L_x, L_xi);
}

QuadratureWeights build_weights(const Grid& grid) {
  QuadratureWeights w;
  w.rho.assign(grid.n_x(), grid.h_x());
  w.sigma.assign(grid.n_xi(), grid.h_xi());
  w.sigma.front() = 0.5 * grid.h_xi();
  w.sigma.back() = 0.5 * grid.h_xi();
  return w;
}

double wrapped_distance(const Grid& grid, double x_a, double x_b) {
  const double period = 2.0 * grid.L_x();
  double d = std::fmod(std::abs(x_a - x_b), period);
  return std::min(d, period - d);
}

}  // namespace dendrofield
