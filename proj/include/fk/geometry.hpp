#pragma once

// Planar star-shaped domains and the asymmetry quantities built on them.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fk {

using Point2 = Eigen::Vector2d;

struct DiscShape {
  double radius;
};

/// Ellipse with semi-axes (1+eps) along x1 and (1-eps) along x2. The
/// normalized variant is scaled by (1-eps^2)^(-1/2) to have area pi.
struct EllipseShape {
  double eps;
  bool normalized;
};

/// r(theta) = radius * (1 + amplitude * cos(mode * theta)).
struct PerturbedDiscShape {
  double amplitude;
  int mode;
  double radius = 1.0;
};

/// Regular polygon with a vertex on the positive x1 axis.
struct RegularPolygonShape {
  int sides;
  double circumradius;
};

/// Equispaced samples of r(theta) on [0, 2pi), trigonometrically interpolated.
struct SampledShape {
  std::vector<double> samples;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

using Shape = std::variant<DiscShape, EllipseShape, PerturbedDiscShape, RegularPolygonShape, SampledShape>;

/// Domain {center + t (cos th, sin th) : 0 <= t < scale * radial(th)}.
/// Immutable after construction.
class StarDomain {
 public:
  static StarDomain disc(double radius);
  static StarDomain ellipse(double eps, bool normalized);
  static StarDomain perturbed_disc(double amplitude, int mode, double radius = 1.0);
  static StarDomain regular_polygon(int sides, double circumradius);
  static StarDomain sampled(std::vector<double> samples);

  StarDomain translated(const Point2& shift) const;
  StarDomain scaled(double factor) const;
  /// Sampled domains only: rotate the table by `steps` samples.
  StarDomain rotated_samples(int steps) const;

  double radius(double theta) const;
  double radius_derivative(double theta) const;
  bool contains(const Point2& p) const;

  const Point2& center() const { return center_; }
  const Shape& shape() const { return shape_; }
  double scale() const { return scale_; }

  /// Angles in [0, 2pi) where radial() is not smooth.
  std::vector<double> kink_angles() const;
  /// Upper bound on radial() over the circle.
  double max_radius() const;
  /// Canonical text form, e.g. "ellipse(0.1,normalized)".
  std::string spec() const;

 private:
  StarDomain(Point2 center, Shape shape, double scale);

  Point2 center_;
  Shape shape_;
  double scale_;
};

/// Parses the canonical spec form back into a domain; throws ConfigError.
StarDomain parse_domain(const std::string& text);

double area(const StarDomain& d);
double perimeter(const StarDomain& d);
Point2 centroid(const StarDomain& d);
/// Radius of the disc with the same area.
double equal_volume_ball_radius(const StarDomain& d);

/// |d  symmetric-difference  B(ball_center, ball_radius)| by midpoint quadrature
/// on a tensor grid over the joint bounding box, doubling the resolution until
/// two successive estimates agree within 1e-4 |B|.
double symdiff_volume(const StarDomain& d, const Point2& ball_center, double ball_radius, int resolution);

/// Same quantity from |d| + |B| - 2|d n B|, the intersection integrated in
/// polar coordinates about the domain center (exact up to quadrature).
double symdiff_volume_polar(const StarDomain& d, const Point2& ball_center, double ball_radius);

struct AsymmetryResult {
  double value = 0;
  Point2 optimal_center = Point2::Zero();
  double ball_radius = 0;
  int evaluations = 0;
  bool flagged = false;  // some start stopped on the iteration cap
};

struct AsymmetryOptions {
  double simplex_tolerance = 1e-4;  // relative to the equal-volume radius
  int max_iterations = 2000;
  std::uint64_t seed = 0;  // rotates the multistart ring
};

/// Fraenkel asymmetry min_x |d  delta  (x + B)| / |B| by Nelder-Mead from the
/// centroid plus a ring of 4 starts at distance r_eq/4.
AsymmetryResult fraenkel_asymmetry(const StarDomain& d, const AsymmetryOptions& options = {});

struct IsoperimetricRecord {
  double perimeter_deficit;
  double asymmetry;
  double ratio;  // perimeter_deficit / asymmetry^2
};

IsoperimetricRecord isoperimetric_checks(const StarDomain& d, const AsymmetryOptions& options = {});

/// 2D Nelder-Mead used by fraenkel_asymmetry; exposed for testing.
struct SimplexResult {
  Point2 x;
  double value;
  int evaluations;
  bool converged;
};

template <typename F>
SimplexResult nelder_mead(F&& f, const Point2& start, double step, double tolerance, int max_iterations);

}  // namespace fk

#include "fk/detail/nelder_mead.hpp"
