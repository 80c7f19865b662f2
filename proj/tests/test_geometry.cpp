#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fk/errors.hpp"
#include "fk/geometry.hpp"

using namespace fk;

namespace {

constexpr double pi = std::numbers::pi;

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, out = 0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

// Quasi-Monte Carlo oracle for |d delta B(c, rho)| on a Halton sequence
// over the joint bounding box.
double qmc_symdiff(const StarDomain& d, const Point2& c, double rho, std::uint64_t samples) {
  const double reach = d.max_radius();
  const double x0 = std::min(d.center().x() - reach, c.x() - rho), x1 = std::max(d.center().x() + reach, c.x() + rho);
  const double y0 = std::min(d.center().y() - reach, c.y() - rho), y1 = std::max(d.center().y() + reach, c.y() + rho);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 1; i <= samples; ++i) {
    const Point2 p(x0 + (x1 - x0) * radical_inverse(i, 2), y0 + (y1 - y0) * radical_inverse(i, 3));
    if (((p - c).squaredNorm() < rho * rho) != d.contains(p)) ++hits;
  }
  return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace

TEST_CASE("area and perimeter of named shapes") {
  const auto disc = StarDomain::disc(1.0);
  CHECK(std::abs(area(disc) - pi) < 1e-8);
  CHECK(std::abs(perimeter(disc) - 2 * pi) < 1e-8);

  const auto e = StarDomain::ellipse(0.1, false);
  CHECK(std::abs(area(e) - pi * 1.1 * 0.9) < 1e-8);
  // Perimeter of an ellipse: 4 a E(k), k^2 = 1 - b^2/a^2.
  const double a = 1.1, b = 0.9;
  CHECK(std::abs(perimeter(e) - 4 * a * std::comp_ellint_2(std::sqrt(1 - b * b / (a * a)))) < 1e-8);

  const auto p = StarDomain::perturbed_disc(0.05, 3);
  CHECK(std::abs(area(p) - pi * (1 + 0.05 * 0.05 / 2)) < 1e-8);

  for (int n : {3, 4, 5, 6, 8}) {
    const auto poly = StarDomain::regular_polygon(n, 1.3);
    CHECK(std::abs(area(poly) - 0.5 * n * 1.3 * 1.3 * std::sin(2 * pi / n)) < 1e-8);
    CHECK(std::abs(perimeter(poly) - 2 * n * 1.3 * std::sin(pi / n)) < 1e-8);
  }
}

TEST_CASE("equal-volume radius") {
  CHECK(std::abs(equal_volume_ball_radius(StarDomain::disc(1.0)) - 1) < 1e-10);
  for (double eps : {0.05, 0.1, 0.2, 0.3}) {
    CHECK(std::abs(equal_volume_ball_radius(StarDomain::ellipse(eps, true)) - 1) < 1e-6);
  }
  const auto p = StarDomain::perturbed_disc(0.06, 4);
  CHECK(std::abs(equal_volume_ball_radius(p.scaled(2.0)) - 2 * equal_volume_ball_radius(p)) < 1e-10);
}

TEST_CASE("sampled domains: interpolation and rotation invariance") {
  const int n = 41;
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) {
    const double th = 2 * pi * j / n;
    s[j] = 1 + 0.1 * std::cos(2 * th) + 0.05 * std::sin(3 * th);
  }
  const auto d = StarDomain::sampled(s);
  CHECK(std::abs(d.radius(0.123) - (1 + 0.1 * std::cos(0.246) + 0.05 * std::sin(0.369))) < 1e-12);
  CHECK(std::abs(area(d) - pi * (1 + (0.01 + 0.0025) / 2)) < 1e-8);
  const auto r = d.rotated_samples(1);
  CHECK(std::abs(area(r) - area(d)) < 1e-8);
  CHECK(std::abs(perimeter(r) - perimeter(d)) < 1e-8);

  // Even sample counts carry a Nyquist term.
  std::vector<double> even(16);
  for (int j = 0; j < 16; ++j) even[j] = 1 + 0.05 * std::cos(2 * pi * 3 * j / 16);
  const auto de = StarDomain::sampled(even);
  CHECK(std::abs(area(de.rotated_samples(1)) - area(de)) < 1e-8);
  CHECK(std::abs(perimeter(de.rotated_samples(1)) - perimeter(de)) < 1e-8);

  CHECK_THROWS_AS(StarDomain::sampled({1.0, -1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(StarDomain::sampled({1.0, 1.0}), PreconditionError);
}

TEST_CASE("containment and validation") {
  const auto poly = StarDomain::regular_polygon(4, 1.0);
  CHECK(poly.contains(Point2(0.7, 0.0)));
  CHECK_FALSE(poly.contains(Point2(0.6, 0.6)));
  CHECK(poly.contains(Point2(0.49, 0.49)));
  CHECK(StarDomain::disc(1).translated(Point2(3, 0)).contains(Point2(3.5, 0.5)));
  CHECK_THROWS_AS(StarDomain::ellipse(1.0, true), PreconditionError);
  CHECK_THROWS_AS(StarDomain::perturbed_disc(1.0, 2), PreconditionError);
  CHECK_THROWS_AS(StarDomain::regular_polygon(2, 1.0), PreconditionError);
  CHECK_THROWS_AS(StarDomain::disc(0.0), PreconditionError);
}

TEST_CASE("domain specs round-trip through the parser") {
  for (const char* text : {"disc(1)", "ellipse(0.1,normalized)", "ellipse(0.2,raw)", "perturbed_disc(0.03,2)",
                           "regular_polygon(5,1)", "perturbed_disc(0.1,3,2)"}) {
    CHECK(parse_domain(text).spec() == text);
  }
  CHECK(parse_domain(" disc( 2 ) ").spec() == "disc(2)");
  CHECK_THROWS_AS(parse_domain("square(1)"), ConfigError);
  CHECK_THROWS_AS(parse_domain("disc(x)"), ConfigError);
  CHECK_THROWS_AS(parse_domain("disc(1"), ConfigError);
  CHECK_THROWS_AS(parse_domain("regular_polygon(4.5,1)"), ConfigError);
  CHECK_THROWS_AS(parse_domain("ellipse(1.5)"), ConfigError);
}

TEST_CASE("symmetric difference by grid quadrature") {
  const auto disc = StarDomain::disc(1.0);
  CHECK(symdiff_volume(disc, Point2::Zero(), 1.0, 64) < 1e-4 * pi);
  CHECK(std::abs(symdiff_volume(disc, Point2(4, 0), 1.0, 64) - 2 * pi) < 1e-3);
  CHECK_THROWS_AS(symdiff_volume(disc, Point2::Zero(), 1.0, 32), PreconditionError);

  const auto e = StarDomain::ellipse(0.2, true);
  const double grid = symdiff_volume(e, Point2::Zero(), 1.0, 64);
  const double qmc = qmc_symdiff(e, Point2::Zero(), 1.0, 10'000'000);
  const double polar = symdiff_volume_polar(e, Point2::Zero(), 1.0);
  CHECK(grid > 0);
  CHECK(std::abs(grid - qmc) < 5e-4 * pi);
  CHECK(std::abs(polar - qmc) < 2e-4 * pi);
}

TEST_CASE("polar symmetric difference: bounds and exact cases") {
  const auto p = StarDomain::perturbed_disc(0.06, 3);
  const double ap = area(p);
  for (const Point2& c : {Point2(0, 0), Point2(0.3, -0.2), Point2(1.5, 0.4), Point2(-0.9, 0.9)}) {
    for (double rho : {0.2, 0.8, 1.0, 2.5}) {
      const double v = symdiff_volume_polar(p, c, rho);
      CHECK(v <= ap + pi * rho * rho + 1e-10);
      CHECK(v >= std::abs(ap - pi * rho * rho) - 1e-10);
    }
  }
  CHECK(std::abs(symdiff_volume_polar(p, Point2(5, 0), 1.0) - (ap + pi)) < 1e-10);
  // Concentric discs: |pi R^2 - pi rho^2|.
  CHECK(std::abs(symdiff_volume_polar(StarDomain::disc(1.0), Point2::Zero(), 0.5) - 0.75 * pi) < 1e-10);
  // Two unit discs at distance d: 2 pi - 2 lens, lens = 2 acos(d/2) - (d/2) sqrt(4 - d^2).
  const double dist = 0.7;
  const double lens = 2 * std::acos(dist / 2) - dist / 2 * std::sqrt(4 - dist * dist);
  CHECK(std::abs(symdiff_volume_polar(StarDomain::disc(1.0), Point2(dist, 0), 1.0) - (2 * pi - 2 * lens)) < 1e-10);
}

TEST_CASE("Nelder-Mead minimizes a quadratic") {
  auto f = [](const Point2& x) { return (x - Point2(0.3, -1.2)).squaredNorm() + 0.5; };
  const auto r = nelder_mead(f, Point2(2, 2), 0.5, 1e-8, 2000);
  CHECK(r.converged);
  CHECK((r.x - Point2(0.3, -1.2)).norm() < 1e-7);
}

TEST_CASE("Fraenkel asymmetry of discs vanishes") {
  for (const Point2& c : {Point2(0, 0), Point2(1.5, -2.0)}) {
    const auto d = StarDomain::disc(0.8).translated(c);
    const auto res = fraenkel_asymmetry(d);
    CHECK(res.value < 1e-3);
    CHECK((res.optimal_center - c).norm() < 1e-3);
    CHECK(std::abs(res.ball_radius - 0.8) < 1e-10);
  }
}

TEST_CASE("Fraenkel asymmetry is translation and scale invariant") {
  const auto d = StarDomain::perturbed_disc(0.06, 3);
  const auto base = fraenkel_asymmetry(d);
  const Point2 v(2.5, -1.25);
  const auto moved = fraenkel_asymmetry(d.translated(v));
  CHECK(std::abs(moved.value - base.value) < 1e-6);
  CHECK((moved.optimal_center - (base.optimal_center + v)).norm() < 1e-6);
  for (double s : {0.5, 2.0}) CHECK(std::abs(fraenkel_asymmetry(d.scaled(s)).value - base.value) < 1e-4);
  CHECK(base.value > 0);
  CHECK(base.value < 2);
}

TEST_CASE("Fraenkel asymmetry of normalized ellipses is linear in eps") {
  // The symmetric difference with the unit disc is the band between
  // r(theta) ~ 1 + eps cos(2 theta) and 1, so A ~ (4/pi) eps.
  std::vector<double> per_eps;
  for (double eps : {0.05, 0.1, 0.2}) {
    const auto res = fraenkel_asymmetry(StarDomain::ellipse(eps, true));
    CHECK(res.optimal_center.norm() < 1e-3);
    per_eps.push_back(res.value / eps);
  }
  const auto [lo, hi] = std::minmax_element(per_eps.begin(), per_eps.end());
  CHECK(*hi / *lo < 1.1);
  CHECK(std::abs(per_eps[0] - 4 / pi) < 0.05);
}

TEST_CASE("Fraenkel asymmetry is deterministic for a fixed seed") {
  const auto d = StarDomain::regular_polygon(5, 1.0);
  AsymmetryOptions opt;
  opt.seed = 7;
  const auto a = fraenkel_asymmetry(d, opt);
  const auto b = fraenkel_asymmetry(d, opt);
  CHECK(a.value == b.value);
  CHECK(a.optimal_center == b.optimal_center);
}

TEST_CASE("isoperimetric checks") {
  const auto disc = isoperimetric_checks(StarDomain::disc(1.0));
  CHECK(std::abs(disc.perimeter_deficit) < 1e-8);
  CHECK(isoperimetric_checks(StarDomain::ellipse(0.1, true)).perimeter_deficit > 0);
  double lo = 1e300;
  for (double a : {0.02, 0.04, 0.08}) {
    const auto rec = isoperimetric_checks(StarDomain::perturbed_disc(a, 3));
    CHECK(rec.perimeter_deficit > -1e-6);
    lo = std::min(lo, rec.ratio);
  }
  CHECK(lo > 0.1);
}
