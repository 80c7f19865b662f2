#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fk/ball_spectrum.hpp"

using namespace fk;

namespace {

// Oracle: scan G(r, lambda) on a dense lambda grid below the Dirichlet value,
// then bisect the first sign change. Uses the standard library Bessel
// functions, not the ones under test.
double scan_bisect_lambda(int dim, double beta, double r) {
  const double nu = dim / 2.0;
  auto G = [&](double lam) {
    const double s = std::sqrt(lam);
    return s * std::cyl_bessel_j(nu, s * r) - beta * std::cyl_bessel_j(nu - 1, s * r);
  };
  const double j = dim == 2 ? 2.404825557695773 : std::numbers::pi;
  const double top = (j / r) * (j / r);
  double lo = top * 1e-9, prev = G(lo);
  for (int i = 1; i <= 20000; ++i) {
    const double lam = top * i / 20000.0;
    const double cur = G(lam);
    if ((prev < 0) != (cur < 0)) {
      double a = lo, b = lam;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        ((G(m) < 0) == (prev < 0) ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    lo = lam;
    prev = cur;
  }
  return std::nan("");
}

}  // namespace

TEST_CASE("ball eigenvalue agrees with the scan-and-bisect oracle") {
  for (int dim : {2, 3}) {
    for (double beta : {0.1, 1.0, 5.0}) {
      for (double r : {0.5, 1.0, 2.0}) {
        const auto sol = robin_eigenvalue_ball(BallQuery<double>{dim, beta, r});
        CHECK(std::abs(sol.lambda - scan_bisect_lambda(dim, beta, r)) < 1e-10 * sol.lambda + 1e-13);
      }
    }
  }
}

TEST_CASE("ball eigenvalue frozen values") {
  // 30-digit reference values from an arbitrary-precision bisection.
  CHECK(std::abs(robin_eigenvalue_ball(BallQuery<double>{2, 1.0, 1.0}).lambda - 1.5769927308086067) < 1e-13);
  CHECK(std::abs(robin_eigenvalue_ball(BallQuery<double>{2, 0.5, 1.0}).lambda - 0.8850492539943069) < 1e-13);
  CHECK(std::abs(robin_eigenvalue_ball(BallQuery<double>{2, 5.0, 1.0}).lambda - 3.9593625989150372) < 1e-13);
  // N = 3, beta = 1, r = 1: G reduces to -sqrt(2/(pi s)) s cos s, so s = pi/2.
  const double pi = std::numbers::pi;
  CHECK(std::abs(robin_eigenvalue_ball(BallQuery<double>{3, 1.0, 1.0}).lambda - pi * pi / 4) < 1e-13);
}

TEST_CASE("ball eigenvalue limits") {
  const auto small = robin_eigenvalue_ball(BallQuery<double>{2, 1e-8, 1.0});
  CHECK(std::abs(small.lambda / 1e-8 - 2.0) < 1e-6);

  const double j01 = dirichlet_zero<double>(2);
  CHECK(std::abs(j01 - 2.404825557695773) < 1e-15);
  const auto big = robin_eigenvalue_ball(BallQuery<double>{2, 1e6, 1.0});
  CHECK(std::abs(big.lambda - j01 * j01) < 1e-2);
  CHECK(big.lambda < j01 * j01);

  const auto tiny_r = robin_eigenvalue_ball(BallQuery<double>{2, 1.0, 1e-3});
  CHECK(std::abs(1e-3 * tiny_r.lambda - 2.0) < 1e-2);
}

TEST_CASE("ball eigenvalue residual and Dirichlet ceiling") {
  for (int dim : {2, 3}) {
    for (double beta : {1e-6, 0.5, 1.0, 5.0, 1e3, 1e6}) {
      for (double r : {1e-3, 0.1, 1.0, 7.0}) {
        const auto sol = robin_eigenvalue_ball(BallQuery<double>{dim, beta, r});
        const double j = dirichlet_zero<double>(dim);
        CHECK(sol.residual <= 1e-10);
        CHECK(sol.lambda > 0);
        CHECK(sol.lambda < (j / r) * (j / r));
      }
    }
  }
}

TEST_CASE("ball query validation") {
  CHECK_THROWS_AS(robin_eigenvalue_ball(BallQuery<double>{4, 1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(robin_eigenvalue_ball(BallQuery<double>{2, 0.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(robin_eigenvalue_ball(BallQuery<double>{2, 1.0, -1.0}), PreconditionError);
}

TEST_CASE("scaling: lambda(beta, r) = lambda(beta r, 1) / r^2") {
  for (int dim : {2, 3}) {
    for (double beta : {0.5, 2.0}) {
      for (double r : {0.3, 1.7, 4.0}) {
        const double direct = robin_eigenvalue_ball(BallQuery<double>{dim, beta, r}).lambda;
        const double scaled = robin_eigenvalue_ball(BallQuery<double>{dim, beta * r, 1.0}).lambda / (r * r);
        CHECK(std::abs(direct - scaled) <= 1e-9 * direct);
      }
    }
  }
}

TEST_CASE("g and g' from the ODE") {
  CHECK(g_value(BallQuery<double>{2, 1.0, 1e-9}) == 2.0);
  CHECK(std::abs(g_value(BallQuery<double>{2, 1.0, 1e-6}) - 2.0) < 1e-5);
  for (int i = 1; i <= 50; ++i) {
    const double r = 0.1 * i;
    const BallQuery<double> q{2, 1.0, r};
    CHECK(g_prime_ode(q) < 0);
    CHECK(g_value(q) < 2.0);
  }
}

TEST_CASE("g' matches central differences") {
  for (int dim : {2, 3}) {
    for (double beta : {0.5, 1.0, 5.0}) {
      for (double r = 0.1; r <= 5.0 + 1e-12; r += 0.35) {
        const double step = 1e-4;
        const double fd = (g_value(BallQuery<double>{dim, beta, r + step}) -
                           g_value(BallQuery<double>{dim, beta, r - step})) /
                          (2 * step);
        const double ode = g_prime_ode(BallQuery<double>{dim, beta, r});
        CHECK(std::abs(fd - ode) <= 1e-6 * std::abs(ode));
      }
    }
  }
}

TEST_CASE("second differences of a linear function vanish") {
  const std::vector<double> x{0.0, 0.5, 1.0};
  const std::vector<double> y{1.0, 2.0, 3.0};
  const auto d = second_differences<double>(x, y);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(0.0));
  const std::vector<double> xq{0.0, 0.5, 2.0, 3.0};
  const std::vector<double> yq{0.0, 0.25, 4.0, 9.0};
  for (double v : second_differences<double>(xq, yq)) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("convexity scan on the standard grid") {
  std::vector<double> grid;
  for (int i = 0; i <= 98; ++i) grid.push_back(0.1 + 0.05 * i);
  const auto rep = convexity_scan<double>(2, 1.0, grid, 1.0);
  CHECK(rep.g_violations == 0);
  CHECK(rep.penalized_violations == 0);
  CHECK(rep.g_second_min > 0);
  // lambda + k pi r^2 has second derivative >= 2 pi k.
  CHECK(rep.penalized_second_min > 2 * std::numbers::pi);
}

TEST_CASE("radial profile") {
  const BallQuery<double> q{2, 1.0, 1.0};
  const auto prof = radial_profile(q, 200);
  CHECK(std::abs(prof.beta_rho[prof.beta_rho.size() - 1] - 1.0) < 1e-8);
  CHECK(prof.beta_rho[0] < 1e-2);
  for (Eigen::Index i = 1; i < prof.beta_rho.size(); ++i) CHECK(prof.beta_rho[i] > prof.beta_rho[i - 1]);

  // beta_rho ~ lambda rho / N at the origin.
  const double lambda = robin_eigenvalue_ball(q).lambda;
  const auto s = std::sqrt(lambda);
  CHECK(std::abs(radial_log_gradient(2, s, 1e-6) / 1e-6 - lambda / 2) < 1e-6);

  for (double beta : {0.5, 5.0}) {
    const auto p3 = radial_profile(BallQuery<double>{3, beta, 2.0}, 50);
    CHECK(std::abs(p3.beta_rho[p3.beta_rho.size() - 1] - beta) < 1e-8);
    for (Eigen::Index i = 1; i < p3.beta_rho.size(); ++i) CHECK(p3.beta_rho[i] > p3.beta_rho[i - 1]);
  }
  CHECK_THROWS_AS(radial_profile(q, 1), PreconditionError);
}

TEST_CASE("hb functional reproduces the eigenvalue") {
  const BallQuery<double> q{2, 1.0, 1.0};
  const double lambda = robin_eigenvalue_ball(q).lambda;
  CHECK(std::abs(hb_functional(q, 0.5) - lambda) < 1e-8);
  CHECK(std::abs(hb_functional(q, 1e-3) - lambda) < 1e-8);
  CHECK(std::abs(hb_functional(q, 1.0 - 1e-9) - lambda) < 1e-6);
  CHECK_THROWS_AS(hb_functional(q, 1.0), PreconditionError);
  CHECK_THROWS_AS(hb_functional(q, 0.0), PreconditionError);

  // Rearranged at s = R: int_0^1 2 rho beta_rho^2 drho = 2 beta_1 - lambda.
  const double s = std::sqrt(lambda);
  const double bulk = integrate([&](double rho) {
    const double b = radial_log_gradient(2, s, rho);
    return 2 * rho * b * b;
  }, 0.0, 1.0, 1e-13);
  CHECK(std::abs(bulk - (2 * 1.0 - lambda)) < 1e-10);
}

TEST_CASE("penalized k makes the equal-volume ball the minimizer") {
  const double pi = std::numbers::pi;
  const double k = penalized_k_for_volume(2, 1.0, pi);
  CHECK(k > 0);
  std::vector<double> vals;
  double best_r = 0, best = 1e300;
  for (int i = 0; i <= 2800; ++i) {
    const double r = 0.2 + 0.001 * i;
    const double v = robin_eigenvalue_ball(BallQuery<double>{2, 1.0, r}).lambda + k * pi * r * r;
    vals.push_back(v);
    if (v < best) {
      best = v;
      best_r = r;
    }
  }
  CHECK(std::abs(best_r - 1.0) <= 0.001);
  int sign_changes = 0;
  for (std::size_t i = 2; i < vals.size(); ++i) {
    if ((vals[i] - vals[i - 1] > 0) != (vals[i - 1] - vals[i - 2] > 0)) ++sign_changes;
  }
  CHECK(sign_changes == 1);

  for (int dim : {2, 3}) {
    for (double beta : {0.1, 1.0, 10.0}) {
      for (double m : {0.5, 3.0, 20.0}) CHECK(penalized_k_for_volume(dim, beta, m) > 0);
    }
  }
  CHECK_THROWS_AS(penalized_k_for_volume(2, 1.0, 0.0), PreconditionError);
}
