#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dendrofield/error.hpp"
#include "dendrofield/model.hpp"
#include "oracles/oracles.hpp"

using namespace dendrofield;
using doctest::Approx;

TEST_SUITE("model") {
  TEST_CASE("firing rates at reference points") {
    CHECK(eval_firing_rate(Sigmoid{1000, 0.01}, 0.01) == 0.5);
    CHECK(eval_firing_rate(ShiftedSigmoid{30}, 0.0) == 0.0);
    CHECK(std::abs(eval_firing_rate(Sigmoid{1000, 0.01}, 1.0) - 1.0) < 1e-12);
    CHECK(eval_firing_rate(Heaviside{0.2}, 0.2) == 0.5);
    CHECK(eval_firing_rate(Heaviside{0.2}, 0.3) == 1.0);
    CHECK(eval_firing_rate(Heaviside{0.2}, 0.1) == 0.0);
  }

  TEST_CASE("sigmoid saturates without overflow") {
    CHECK(eval_firing_rate(Sigmoid{1e6, 0.0}, -1.0) < 1e-300);
    CHECK(eval_firing_rate(Sigmoid{1e6, 0.0}, 1.0) == 1.0);
    CHECK(std::isfinite(eval_firing_rate(ShiftedSigmoid{1e9}, -3.0)));
  }

  TEST_CASE("rates are monotone") {
    const FiringRate rates[] = {Sigmoid{7, 0.3}, ShiftedSigmoid{30}, Heaviside{0.1}};
    for (const auto& r : rates) {
      double prev = -1.0;
      for (double v = -2.0; v <= 2.0; v += 0.01) {
        const double s = eval_firing_rate(r, v);
        CHECK(s >= prev);
        prev = s;
      }
    }
  }

  TEST_CASE("slope at zero") {
    CHECK(firing_rate_slope_at_zero(ShiftedSigmoid{28}) == Approx(7.0));
    CHECK(firing_rate_slope_at_zero(ShiftedSigmoid{4}) == Approx(1.0));
    CHECK(firing_rate_slope_at_zero(Sigmoid{2, 0}) == Approx(0.5));
    CHECK_THROWS_WITH(firing_rate_slope_at_zero(Heaviside{0.1}),
                      doctest::Contains("slope undefined at threshold"));
  }

  TEST_CASE("slope at zero matches finite differences") {
    const FiringRate rates[] = {Sigmoid{2, 0}, Sigmoid{5, 0.3}, Sigmoid{20, -0.1},
                                ShiftedSigmoid{30}, ShiftedSigmoid{3}};
    for (const auto& r : rates) {
      const double fd =
          oracle::central_difference([&](double v) { return eval_firing_rate(r, v); }, 0.0, 1e-6);
      const double s = firing_rate_slope_at_zero(r);
      CHECK(std::abs(fd - s) / s < 1e-6);
    }
  }

  TEST_CASE("kernel values") {
    CHECK(eval_kernel(MexicanHat{1, 1, 0.25, 0.5}, 0.0) == Approx(0.75));
    CHECK(eval_kernel(ExpDecay{3}, 0.0) == Approx(1.5));
    CHECK(eval_kernel(ExpDecay{3}, 2.0) == Approx(0.551819).epsilon(1e-6));
    CHECK(kernel_bound(ExpDecay{3}) == 1.5);
  }

  TEST_CASE("kernel Fourier transform closed forms") {
    CHECK(kernel_fourier(MexicanHat{1, 1, 0.25, 0.5}, 0.0) == Approx(1.0));
    CHECK(kernel_fourier(ExpDecay{3}, 0.0) == Approx(6.0));
    const double pk = 0.4002;
    CHECK(kernel_fourier(MexicanHat{1, 1, 0.25, 0.5}, pk) == Approx(1.1143).epsilon(1e-4));
    // stationary at the maximum
    auto what = [](double p) { return kernel_fourier(MexicanHat{1, 1, 0.25, 0.5}, p); };
    CHECK(std::abs(oracle::central_difference(what, 0.400236, 1e-5)) < 1e-5);
  }

  TEST_CASE("kernel Fourier transform matches quadrature") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> P(0.0, 3.0);
    const SomaticKernel kernels[] = {ExpDecay{3}, MexicanHat{1, 1, 0.25, 0.5}};
    for (const auto& k : kernels) {
      // 40 decay lengths of the slowest exponential (rate 1/2)
      const double L = 80.0;
      for (int t = 0; t < 10; ++t) {
        const double p = P(rng);
        const double q =
            oracle::even_fourier([&](double y) { return eval_kernel(k, y); }, p, L, 400000);
        CHECK(std::abs(q - kernel_fourier(k, p)) < 1e-8);
      }
    }
  }

  TEST_CASE("delta profiles") {
    CHECK(eval_delta(GaussianDelta{0.005}, 0.0) == Approx(112.8379).epsilon(1e-6));
    CHECK(eval_delta(TruncatedGaussianDelta{0.005, 1.0}, 0.01) == 0.0);
    CHECK(eval_delta(TruncatedGaussianDelta{0.005, 1.0}, 0.005) == 0.0);
    CHECK(eval_delta(TruncatedGaussianDelta{0.005, 2.0}, 0.0) == 2.0);
    for (double xi : {0.001, 0.3, 1.7})
      CHECK(eval_delta(GaussianDelta{0.2}, xi) == eval_delta(GaussianDelta{0.2}, -xi));
    CHECK(has_compact_support(TruncatedGaussianDelta{}));
    CHECK_FALSE(has_compact_support(GaussianDelta{}));
  }

  TEST_CASE("Gaussian delta integrates to one when resolved") {
    const double eps = 0.05, h = eps / 4;
    const int n = static_cast<int>(std::lround(2.0 / h));
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 0.5 * h : h;
      s += w * eval_delta(GaussianDelta{eps}, -1.0 + k * h);
    }
    CHECK(std::abs(s - 1.0) < 1e-6);
  }

  TEST_CASE("parameter validation") {
    PhysicalParams p;
    p.gamma = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("gamma"), ValidationError);
    p = PhysicalParams{};
    p.nu = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("nu"), ValidationError);
    p = PhysicalParams{};
    p.eps = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("eps"), ValidationError);
    ModelSpec m;
    m.kernel = ExpDecay{-1.0};
    CHECK_THROWS_AS(m.validate(), ValidationError);
  }
}
