#pragma once

// First Robin eigenvalue of balls in dimension 2 and 3.
//
// On B_r the first eigenfunction is radial, u(rho) = rho^(1-N/2) J_{N/2-1}(s rho)
// with s = sqrt(lambda), and the Robin condition reduces to
//
//   G(r, lambda) = s J_{N/2}(s r) - beta J_{N/2-1}(s r) = 0,
//
// whose smallest positive root lies below the first Dirichlet eigenvalue
// (j/r)^2, j the first positive zero of J_{N/2-1}. The root is always
// computed in long double and cast back to the requested scalar.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fk/errors.hpp"
#include "fk/specfun.hpp"

namespace fk {

template <typename Scalar = double>
struct BallQuery {
  int dim = 2;
  Scalar beta = 1;
  Scalar radius = 1;

  void validate() const {
    if (dim != 2 && dim != 3) throw PreconditionError("ball query: dim must be 2 or 3");
    if (!(beta > 0)) throw PreconditionError("ball query: beta must be positive");
    if (!(radius > 0)) throw PreconditionError("ball query: radius must be positive");
  }
};

template <typename Scalar = double>
struct BallSolution {
  Scalar lambda;
  Scalar sqrt_lambda;
  Scalar residual;  // |G(r, lambda)| at the extended-precision root
};

template <typename Scalar = double>
struct RadialProfile {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  BallQuery<Scalar> query;
  Vector rho;
  Vector beta_rho;  // |grad u_B| / u_B at each radius
};

/// Volume and surface area of the ball of radius r in dimension dim.
template <typename Scalar>
Scalar ball_volume(int dim, Scalar r) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return dim == 2 ? pi * r * r : Scalar(4) / 3 * pi * r * r * r;
}

template <typename Scalar>
Scalar ball_surface(int dim, Scalar r) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return dim == 2 ? 2 * pi * r : 4 * pi * r * r;
}

template <typename Scalar>
Scalar ball_radius_for_volume(int dim, Scalar volume) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return dim == 2 ? std::sqrt(volume / pi) : std::cbrt(3 * volume / (4 * pi));
}

/// First positive zero of J_{dim/2-1}: j_{0,1} for dim 2, pi for dim 3.
template <typename Scalar>
Scalar dirichlet_zero(int dim) {
  if (dim == 3) return std::numbers::pi_v<Scalar>;
  static const long double j01 = [] {
    auto j0 = [](long double x) { return bessel_j(0.0L, x); };
    return find_root(j0, make_bracket(j0, 2.0L, 3.0L), 1e-18L);
  }();
  return Scalar(j01);
}

/// G(r, lambda) from the characteristic equation above.
template <typename Scalar>
Scalar robin_ball_residual(int dim, Scalar beta, Scalar r, Scalar lambda) {
  const Scalar s = std::sqrt(lambda);
  const Scalar nu = Scalar(dim) / 2;
  return s * bessel_j(nu, s * r) - beta * bessel_j(nu - 1, s * r);
}

template <typename Scalar>
BallSolution<Scalar> robin_eigenvalue_ball(const BallQuery<Scalar>& q) {
  q.validate();
  using Wide = long double;
  const int dim = q.dim;
  const Wide beta = Wide(q.beta);
  const Wide r = Wide(q.radius);
  const Wide nu = Wide(dim) / 2;
  auto G = [&](Wide s) { return s * bessel_j(nu, s * r) - beta * bessel_j(nu - 1, s * r); };

  const Wide s_hi = dirichlet_zero<Wide>(dim) / r;
  // sqrt(N beta / r) is the small-beta asymptote of sqrt(lambda).
  Wide s_lo = Wide(1e-3) * std::min(std::sqrt(Wide(dim) * beta / r), s_hi);
  for (int i = 0; i < 200 && G(s_lo) >= 0; ++i) s_lo *= Wide(0.5);
  const Wide f_lo = G(s_lo);
  const Wide f_hi = G(s_hi);
  if (!(f_lo < 0 && f_hi > 0))
    throw NumericError("robin_eigenvalue_ball: could not bracket the first root");

  const Wide tol = 8 * std::numeric_limits<Wide>::epsilon() * s_hi;
  const Wide s = find_root(G, Bracket<Wide>{s_lo, s_hi, f_lo, f_hi}, tol);
  const Wide lambda = s * s;
  const Wide residual = std::abs(G(s));
  return {Scalar(lambda), Scalar(s), Scalar(residual)};
}

/// g(r) = r * lambda(B_r). Below r = 1e-8 the continuous extension N*beta
/// is returned.
template <typename Scalar>
Scalar g_value(const BallQuery<Scalar>& q) {
  q.validate();
  if (q.radius < Scalar(1e-8)) return Scalar(q.dim) * q.beta;
  return q.radius * robin_eigenvalue_ball(q).lambda;
}

namespace detail {

template <typename Scalar>
Scalar g_prime_from(int dim, Scalar beta, Scalar r, Scalar g) {
  const Scalar h = g - Scalar(dim - 2) * beta + beta * beta * r;
  if (!(h > 0)) throw NumericError("g_prime_ode: h(r) <= 0", double(h));
  return -(g / r) * (1 - 2 * beta / h);
}

}  // namespace detail

/// Closed-form right-hand side g'(r) = -(g/r)(1 - 2 beta / h),
/// h = g - (N-2) beta + beta^2 r.
template <typename Scalar>
Scalar g_prime_ode(const BallQuery<Scalar>& q) {
  q.validate();
  BallQuery<Scalar> at = q;
  at.radius = std::max(q.radius, Scalar(1e-8));
  const Scalar g = at.radius * robin_eigenvalue_ball(at).lambda;
  return detail::g_prime_from(q.dim, q.beta, at.radius, g);
}

/// d lambda / dr = (g' r - g) / r^2, analytic (no differencing).
template <typename Scalar>
Scalar lambda_prime(const BallQuery<Scalar>& q) {
  q.validate();
  const Scalar r = q.radius;
  const Scalar g = r * robin_eigenvalue_ball(q).lambda;
  const Scalar gp = detail::g_prime_from(q.dim, q.beta, r, g);
  return (gp * r - g) / (r * r);
}

/// Centered second divided differences of y over the (possibly non-uniform)
/// grid x. Entry i corresponds to x[i+1]; for a uniform grid this equals
/// (y[i] - 2 y[i+1] + y[i+2]) / h^2.
template <typename Scalar>
std::vector<Scalar> second_differences(std::span<const Scalar> x, std::span<const Scalar> y) {
  if (x.size() != y.size()) throw PreconditionError("second_differences: size mismatch");
  if (x.size() < 3) throw PreconditionError("second_differences: need at least 3 points");
  std::vector<Scalar> out(x.size() - 2);
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    const Scalar h0 = x[i + 1] - x[i];
    const Scalar h1 = x[i + 2] - x[i + 1];
    if (!(h0 > 0 && h1 > 0)) throw PreconditionError("second_differences: grid must increase");
    out[i] = 2 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0) / (h0 + h1);
  }
  return out;
}

template <typename Scalar = double>
struct ConvexityReport {
  std::vector<Scalar> r;
  std::vector<Scalar> g;
  std::vector<Scalar> penalized;  // lambda(B_r) + k |B_r|
  std::vector<Scalar> g_second;
  std::vector<Scalar> penalized_second;
  int g_violations = 0;
  int penalized_violations = 0;
  Scalar g_second_min = 0;
  Scalar penalized_second_min = 0;  // empirical uniform-convexity constant
};

/// Second differences of g and of r -> lambda(B_r) + k |B_r| over r_grid.
template <typename Scalar>
ConvexityReport<Scalar> convexity_scan(int dim, Scalar beta, std::span<const Scalar> r_grid, Scalar k) {
  if (r_grid.size() < 3) throw PreconditionError("convexity_scan: need at least 3 radii");
  ConvexityReport<Scalar> rep;
  rep.r.assign(r_grid.begin(), r_grid.end());
  for (Scalar r : r_grid) {
    const Scalar lambda = robin_eigenvalue_ball(BallQuery<Scalar>{dim, beta, r}).lambda;
    rep.g.push_back(r * lambda);
    rep.penalized.push_back(lambda + k * ball_volume(dim, r));
  }
  rep.g_second = second_differences<Scalar>(rep.r, rep.g);
  rep.penalized_second = second_differences<Scalar>(rep.r, rep.penalized);
  rep.g_second_min = std::numeric_limits<Scalar>::max();
  rep.penalized_second_min = std::numeric_limits<Scalar>::max();
  for (std::size_t i = 0; i < rep.g_second.size(); ++i) {
    if (!(rep.g_second[i] > 0)) ++rep.g_violations;
    if (!(rep.penalized_second[i] > 0)) ++rep.penalized_violations;
    rep.g_second_min = std::min(rep.g_second_min, rep.g_second[i]);
    rep.penalized_second_min = std::min(rep.penalized_second_min, rep.penalized_second[i]);
  }
  return rep;
}

/// beta_rho = |grad u_B| / u_B = s J_{N/2}(s rho) / J_{N/2-1}(s rho).
template <typename Scalar>
Scalar radial_log_gradient(int dim, Scalar sqrt_lambda, Scalar rho) {
  const Scalar nu = Scalar(dim) / 2;
  const Scalar x = sqrt_lambda * rho;
  if (dim == 3) {
    // u_B = sin(s rho)/rho: |u'|/u = (sin x - x cos x) / (rho sin x).
    if (x < Scalar(0.5)) return sqrt_lambda * bessel_j(nu, x) / bessel_j(nu - 1, x);
    const Scalar sx = std::sin(x);
    if (!(sx > 0)) throw NumericError("radial_profile: u_B vanishes inside the ball");
    return (sx - x * std::cos(x)) / (rho * sx);
  }
  const Scalar denom = bessel_j(nu - 1, x);
  if (!(denom > 0)) throw NumericError("radial_profile: u_B vanishes inside the ball");
  return sqrt_lambda * bessel_j(nu, x) / denom;
}

template <typename Scalar>
RadialProfile<Scalar> radial_profile(const BallQuery<Scalar>& q, int n_points) {
  q.validate();
  if (n_points < 2) throw PreconditionError("radial_profile: n_points must be >= 2");
  const BallSolution<Scalar> sol = robin_eigenvalue_ball(q);
  RadialProfile<Scalar> prof{q, {}, {}};
  prof.rho.resize(n_points);
  prof.beta_rho.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const Scalar rho = q.radius * Scalar(i + 1) / Scalar(n_points);
    prof.rho[i] = rho;
    prof.beta_rho[i] = radial_log_gradient(q.dim, sol.sqrt_lambda, rho);
  }
  return prof;
}

/// Level-set functional on the concentric ball B_s of the radial eigenfunction:
///   (1/|B_s|) ( int_{dB_s} beta_rho dH - int_{B_s} beta_rho^2 dx ).
/// Equals lambda(B_R) for every 0 < s < R.
template <typename Scalar>
Scalar hb_functional(const BallQuery<Scalar>& q, Scalar s, Scalar tol = Scalar(1e-13)) {
  q.validate();
  if (!(s > 0 && s < q.radius)) throw PreconditionError("hb_functional: s must lie in (0, R)");
  const BallSolution<Scalar> sol = robin_eigenvalue_ball(q);
  const int dim = q.dim;
  auto weighted_square = [&](Scalar rho) {
    const Scalar b = radial_log_gradient(dim, sol.sqrt_lambda, rho);
    return std::pow(rho, Scalar(dim - 1)) * b * b;
  };
  // |S^{N-1}| = surface(1); |B_s| = surface(1) s^N / N.
  const Scalar sphere = ball_surface(dim, Scalar(1));
  const Scalar volume = ball_volume(dim, s);
  const Scalar boundary_term = ball_surface(dim, s) * radial_log_gradient(dim, sol.sqrt_lambda, s);
  const Scalar bulk_term = sphere * integrate(weighted_square, Scalar(0), s, tol * std::pow(s, Scalar(dim)));
  return (boundary_term - bulk_term) / volume;
}

/// The k > 0 for which the ball of measure m minimizes r -> lambda(B_r) + k|B_r|:
/// k = -lambda'(r_m) / (d|B_r|/dr)(r_m).
template <typename Scalar>
Scalar penalized_k_for_volume(int dim, Scalar beta, Scalar m) {
  if (!(m > 0)) throw PreconditionError("penalized_k_for_volume: measure must be positive");
  const Scalar r = ball_radius_for_volume(dim, m);
  const Scalar dlambda = lambda_prime(BallQuery<Scalar>{dim, beta, r});
  return -dlambda / ball_surface(dim, r);
}

}  // namespace fk
