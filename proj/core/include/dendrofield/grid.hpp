#pragma once

#include <vector>

namespace dendrofield {

/// Evenly spaced somato-dendritic grid on (-L_x, L_x] x [-L_xi, L_xi].
///
/// Storage is 0-based: x_nodes()[j] = -L_x + (j + 1) h_x for j = 0..n_x-1, so
/// the last somatic node sits at +L_x and -L_x is identified with it by
/// periodicity. xi_nodes()[i] = -L_xi + i h_xi for i = 0..n_xi-1 includes both
/// dendritic endpoints (Neumann boundaries).
class Grid {
 public:
  /// Throws ValidationError unless n_x >= 2, n_xi >= 3, L_x > 0, L_xi > 0.
  Grid(int n_x, int n_xi, double L_x, double L_xi);

  int n_x() const { return n_x_; }
  int n_xi() const { return n_xi_; }
  double L_x() const { return L_x_; }
  double L_xi() const { return L_xi_; }
  double h_x() const { return h_x_; }
  double h_xi() const { return h_xi_; }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& xi_nodes() const { return xi_nodes_; }

  /// Index of the dendritic node closest to xi (ties resolve to the lower index).
  int nearest_xi_index(double xi) const;

  /// Measure of the closed domain, 4 L_x L_xi.
  double measure() const { return 4.0 * L_x_ * L_xi_; }

  bool operator==(const Grid&) const = default;

 private:
  int n_x_;
  int n_xi_;
  double L_x_;
  double L_xi_;
  double h_x_;
  double h_xi_;
  std::vector<double> x_nodes_;
  std::vector<double> xi_nodes_;
};

/// Composite trapezium weights: periodic in x (rho_j = h_x), endpoint-halved
/// in xi.
struct QuadratureWeights {
  std::vector<double> rho;
  std::vector<double> sigma;
};

Grid build_grid(int n_x, int n_xi, double L_x, double L_xi);

QuadratureWeights build_weights(const Grid& grid);

/// Distance on the circle of circumference 2 L_x.
double wrapped_distance(const Grid& grid, double x_a, double x_b);

}  // namespace dendrofield
