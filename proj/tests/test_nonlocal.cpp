#include <cmath>
#include <random>

#include <doctest.h>

#include "dendrofield/error.hpp"
#include "dendrofield/grid.hpp"
#include "dendrofield/nonlocal.hpp"
#include "oracles/oracles.hpp"

using namespace dendrofield;
using doctest::Approx;

namespace {

NonlocalPlan make_plan(int n_x, int n_xi, double L_x, double L_xi, const SomaticKernel& k,
                       const DendriticDelta& d, double xi_0) {
  const Grid g = build_grid(n_x, n_xi, L_x, L_xi);
  return build_plan(g, build_weights(g), k, d, xi_0);
}

Eigen::MatrixXd random_field(int n_xi, int n_x, std::mt19937_64& rng, double scale = 0.5) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::MatrixXd V(n_xi, n_x);
  for (int k = 0; k < V.size(); ++k) V.data()[k] = N(rng);
  return V;
}

double inf_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

oracle::Field to_field(const Eigen::MatrixXd& V) {
  oracle::Field f{static_cast<int>(V.cols()), static_cast<int>(V.rows()),
                  std::vector<double>(V.size())};
  for (int i = 0; i < V.rows(); ++i)
    for (int j = 0; j < V.cols(); ++j) f.at(i, j) = V(i, j);
  return f;
}

}  // namespace

TEST_SUITE("nonlocal") {
  TEST_CASE("kernel samples follow wrapped distance") {
    const NonlocalPlan p = make_plan(4, 3, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.5}, 0.0);
    const double d[] = {0, 1, 2, 1};
    for (int m = 0; m < 4; ++m) CHECK(p.w_samples()[m] == Approx(1.5 * std::exp(-d[m] / 2)));
    for (int m = 1; m < 4; ++m) CHECK(p.w_samples()[m] == p.w_samples()[4 - m]);
  }

  TEST_CASE("alpha equals alpha prime when xi_0 = 0") {
    const NonlocalPlan p = make_plan(4, 9, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.3}, 0.0);
    CHECK(p.alpha() == p.alpha_prime());
    CHECK(p.support_in().size() == 9u);
    CHECK_FALSE(p.compact());
  }

  TEST_CASE("unsampled compact support makes N vanish") {
    // h_xi = 0.5 > 2 eps, xi_0 = 0.25 is 0.25 > eps from every node
    const NonlocalPlan p =
        make_plan(8, 5, 2.0, 1.0, ExpDecay{3}, TruncatedGaussianDelta{0.1, 1.0}, 0.25);
    CHECK(p.support_in().empty());
    CHECK(p.vanishes());
    CHECK_FALSE(p.warnings().empty());
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd N = eval_N_compact(p, Sigmoid{5, 0}, random_field(5, 8, rng));
    CHECK(N.isZero(0.0));
  }

  TEST_CASE("unresolved eps is reported") {
    const NonlocalPlan p = make_plan(8, 9, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.01}, 0.0);
    CHECK_FALSE(p.warnings().empty());
  }

  TEST_CASE("zero rate or zero kernel gives N = 0") {
    const NonlocalPlan p = make_plan(8, 9, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.3}, 0.5);
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(9, 8);
    CHECK(eval_N_direct(p, ShiftedSigmoid{30}, Z).isZero(0.0));
    CHECK(eval_N_fft(p, ShiftedSigmoid{30}, Z).isZero(0.0));
    const NonlocalPlan q =
        make_plan(8, 9, 2.0, 1.0, MexicanHat{1, 1, 1, 1}, GaussianDelta{0.3}, 0.5);
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd V = random_field(9, 8, rng);
    CHECK(eval_N_direct(q, Sigmoid{5, 0}, V).isZero(0.0));
    CHECK(inf_abs(eval_N_fft(q, Sigmoid{5, 0}, V)) < 1e-15);
  }

  TEST_CASE("constant field factorises") {
    const int nx = 4, nxi = 5;
    const NonlocalPlan p = make_plan(nx, nxi, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.5}, 0.5);
    const Eigen::MatrixXd V = Eigen::MatrixXd::Constant(nxi, nx, 0.25);
    const Sigmoid S{2, 0};
    const double s = 1.0 / (1.0 + std::exp(-0.5));
    // sigma = {0.25, 0.5, 0.5, 0.5, 0.25}, h_x = 1, w sums over {0,1,2,1}
    const double sigma[] = {0.25, 0.5, 0.5, 0.5, 0.25};
    const double xi[] = {-1, -0.5, 0, 0.5, 1};
    auto delta = [](double z) { return std::exp(-z * z / 0.25) / (0.5 * std::sqrt(M_PI)); };
    double inner = 0.0;
    for (int i = 0; i < nxi; ++i) inner += delta(xi[i]) * sigma[i];
    const double wsum = 1.5 * (1 + 2 * std::exp(-0.5) + std::exp(-1.0));
    const Eigen::MatrixXd N = eval_N_direct(p, S, V);
    for (int i = 0; i < nxi; ++i)
      for (int j = 0; j < nx; ++j)
        CHECK(N(i, j) == Approx(delta(xi[i] - 0.5) * inner * s * wsum).epsilon(1e-13));
  }

  TEST_CASE("direct evaluation matches the brute-force oracle") {
    std::mt19937_64 rng(5);
    const Sigmoid S{3, 0.1};
    const NonlocalPlan p = make_plan(8, 9, 2.5, 1.5, MexicanHat{1, 1, 0.25, 0.5},
                                     GaussianDelta{0.4}, 0.7);
    const Eigen::MatrixXd V = random_field(9, 8, rng);
    const auto O = oracle::brute_force_N(
        8, 9, 2.5, 1.5, 0.7, [](double d) { return std::exp(-d) - 0.25 * std::exp(-0.5 * d); },
        [](double z) { return std::exp(-z * z / 0.16) / (0.4 * std::sqrt(M_PI)); },
        [](double v) { return 1.0 / (1.0 + std::exp(-3.0 * (v - 0.1))); }, to_field(V));
    const Eigen::MatrixXd N = eval_N_direct(p, S, V);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 8; ++j) CHECK(N(i, j) == Approx(O.at(i, j)).epsilon(1e-12));
  }

  TEST_CASE("fft evaluation matches the oracle on small grids") {
    std::mt19937_64 rng(17);
    for (int nx : {4, 8, 16})
      for (int nxi : {5, 9, 17}) {
        const NonlocalPlan p =
            make_plan(nx, nxi, 3.0, 2.0, ExpDecay{3}, GaussianDelta{0.6}, 1.0);
        for (int t = 0; t < 10; ++t) {
          const Eigen::MatrixXd V = random_field(nxi, nx, rng);
          const Eigen::MatrixXd Nd = eval_N_direct(p, Sigmoid{4, 0.1}, V);
          const Eigen::MatrixXd Nf = eval_N_fft(p, Sigmoid{4, 0.1}, V);
          CHECK(inf_abs(Nf - Nd) <= 1e-10 * inf_abs(Nd));
        }
      }
  }

  TEST_CASE("impulse fixes the circulant orientation") {
    const NonlocalPlan p = make_plan(8, 3, 4.0, 1.0, ExpDecay{3}, GaussianDelta{1}, 0.0);
    std::vector<double> r(8, 0.0), out(8);
    r[2] = 3.0;
    p.convolve(r, out);
    for (int j = 0; j < 8; ++j) CHECK(out[j] == Approx(3.0 * p.w_samples()[(j - 2 + 8) % 8]));
    // an asymmetric probe: two impulses of different weight
    r.assign(8, 0.0);
    r[1] = 1.0;
    r[4] = -2.0;
    p.convolve(r, out);
    for (int j = 0; j < 8; ++j)
      CHECK(out[j] == Approx(p.w_samples()[(j - 1 + 8) % 8] - 2.0 * p.w_samples()[(j - 4 + 8) % 8]));
  }

  TEST_CASE("half spectrum of an even kernel is real") {
    const NonlocalPlan p = make_plan(16, 5, 3.0, 1.0, MexicanHat{1, 1, 0.25, 0.5},
                                     GaussianDelta{0.5}, 0.0);
    CHECK(p.w_hat().size() == 9u);
    double sum = 0.0;
    for (double w : p.w_samples()) sum += w;
    CHECK(p.w_hat()[0].real() == Approx(sum));
    for (const auto& c : p.w_hat()) CHECK(std::abs(c.imag()) < 1e-12);
  }

  TEST_CASE("compact evaluation matches fft with the same truncated delta") {
    std::mt19937_64 rng(23);
    const NonlocalPlan p =
        make_plan(32, 65, 4.0, 2.0, ExpDecay{3}, TruncatedGaussianDelta{0.2, 2.0}, 1.0);
    CHECK(p.compact());
    CHECK(p.support_in().size() < 65u / 4);
    const Eigen::MatrixXd V = random_field(65, 32, rng);
    const Eigen::MatrixXd Nc = eval_N_compact(p, Sigmoid{4, 0}, V);
    const Eigen::MatrixXd Nf = eval_N_fft(p, Sigmoid{4, 0}, V);
    CHECK(inf_abs(Nc - Nf) <= 1e-12);
    std::vector<bool> in(65, false);
    for (int i : p.support_in()) in[i] = true;
    for (int i = 0; i < 65; ++i)
      if (!in[i])
        for (int j = 0; j < 32; ++j) CHECK(Nc(i, j) == 0.0);
    const NonlocalPlan full = make_plan(8, 9, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.3}, 0.0);
    CHECK_THROWS_AS(eval_N_compact(full, Sigmoid{}, Eigen::MatrixXd::Zero(9, 8)), ValidationError);
  }

  TEST_CASE("dimension mismatch") {
    const NonlocalPlan p = make_plan(8, 9, 2.0, 1.0, ExpDecay{3}, GaussianDelta{0.3}, 0.0);
    CHECK_THROWS_AS(eval_N_fft(p, Sigmoid{}, Eigen::MatrixXd::Zero(8, 9)), ValidationError);
    CHECK_THROWS_AS(eval_N_direct(p, Sigmoid{}, Eigen::MatrixXd::Zero(9, 7)), ValidationError);
  }

  TEST_CASE("cyclic shifts commute with N") {
    std::mt19937_64 rng(29);
    const NonlocalPlan p = make_plan(16, 9, 3.0, 2.0, MexicanHat{1, 1, 0.25, 0.5},
                                     GaussianDelta{0.5}, 0.5);
    const Eigen::MatrixXd V = random_field(9, 16, rng);
    const Eigen::MatrixXd N = eval_N_fft(p, Sigmoid{4, 0}, V);
    for (int k : {1, 5, 11}) {
      Eigen::MatrixXd Vs(9, 16), Ns(9, 16);
      for (int j = 0; j < 16; ++j) {
        Vs.col((j + k) % 16) = V.col(j);
        Ns.col((j + k) % 16) = N.col(j);
      }
      CHECK(inf_abs(eval_N_fft(p, Sigmoid{4, 0}, Vs) - Ns) <= 1e-12 * inf_abs(N));
    }
  }

  TEST_CASE("boundedness and Lipschitz estimates") {
    std::mt19937_64 rng(31);
    const Grid g = build_grid(16, 17, 3.0, 2.0);
    const NonlocalPlan p = build_plan(g, build_weights(g), ExpDecay{3}, GaussianDelta{0.5}, 0.5);
    const double beta = 6.0;
    const ShiftedSigmoid S{beta};
    const double CW = p.max_abs_W();
    const double bound = g.n_x() * g.measure() * CW * firing_rate_bound(S);
    const double zeta = g.n_x() * g.measure() * CW * firing_rate_lipschitz(S);
    for (int t = 0; t < 10; ++t) {
      const Eigen::MatrixXd V1 = random_field(17, 16, rng, 2.0);
      const Eigen::MatrixXd V2 = V1 + random_field(17, 16, rng, 0.1);
      const Eigen::MatrixXd N1 = eval_N_fft(p, S, V1), N2 = eval_N_fft(p, S, V2);
      CHECK(N1.cwiseAbs().rowwise().sum().maxCoeff() <= bound);
      CHECK((N1 - N2).cwiseAbs().rowwise().sum().maxCoeff() <=
            zeta * (V1 - V2).cwiseAbs().rowwise().sum().maxCoeff());
    }
  }
}
