#include "fk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "fk/errors.hpp"
#include "fk/specfun.hpp"

namespace fk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

double ellipse_semi_axis_scale(const EllipseShape& e) {
  return e.normalized ? 1.0 / std::sqrt(1.0 - e.eps * e.eps) : 1.0;
}

double sampled_value(const SampledShape& s, double theta) {
  double r = s.cos_coeffs[0];
  for (std::size_t k = 1; k < s.cos_coeffs.size(); ++k) {
    r += s.cos_coeffs[k] * std::cos(k * theta) + s.sin_coeffs[k] * std::sin(k * theta);
  }
  return r;
}

double sampled_derivative(const SampledShape& s, double theta) {
  double dr = 0;
  for (std::size_t k = 1; k < s.cos_coeffs.size(); ++k) {
    dr += k * (s.sin_coeffs[k] * std::cos(k * theta) - s.cos_coeffs[k] * std::sin(k * theta));
  }
  return dr;
}

SampledShape make_sampled(std::vector<double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 3) throw PreconditionError("sampled domain: need at least 3 samples");
  for (double v : samples) {
    if (!(v > 0) || !std::isfinite(v)) throw PreconditionError("sampled domain: samples must be positive");
  }
  const int m = n / 2;
  SampledShape s{std::move(samples), std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 0.0)};
  for (int k = 0; k <= m; ++k) {
    double c = 0, sn = 0;
    for (int j = 0; j < n; ++j) {
      const double th = kTwoPi * j / n;
      c += s.samples[j] * std::cos(k * th);
      sn += s.samples[j] * std::sin(k * th);
    }
    const bool nyquist = (n % 2 == 0 && k == m);
    const double w = (k == 0 || nyquist) ? 1.0 / n : 2.0 / n;
    s.cos_coeffs[k] = w * c;
    s.sin_coeffs[k] = nyquist ? 0.0 : w * sn;
  }
  for (int i = 0; i < 8 * n; ++i) {
    if (!(sampled_value(s, kTwoPi * i / (8 * n)) > 0))
      throw PreconditionError("sampled domain: interpolant is not positive");
  }
  return s;
}

std::vector<double> quadrature_breaks(const StarDomain& d, int uniform) {
  std::vector<double> b;
  for (int i = 0; i <= uniform; ++i) b.push_back(kTwoPi * i / uniform);
  for (double k : d.kink_angles()) b.push_back(k);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::abs(x - y) < 1e-14; }), b.end());
  return b;
}

}  // namespace

StarDomain::StarDomain(Point2 center, Shape shape, double scale)
    : center_(std::move(center)), shape_(std::move(shape)), scale_(scale) {
  if (!(scale_ > 0)) throw PreconditionError("StarDomain: scale must be positive");
}

StarDomain StarDomain::disc(double radius) {
  if (!(radius > 0)) throw PreconditionError("disc: radius must be positive");
  return StarDomain(Point2::Zero(), DiscShape{radius}, 1.0);
}

StarDomain StarDomain::ellipse(double eps, bool normalized) {
  if (!(eps >= 0 && eps < 1)) throw PreconditionError("ellipse: eps must lie in [0, 1)");
  return StarDomain(Point2::Zero(), EllipseShape{eps, normalized}, 1.0);
}

StarDomain StarDomain::perturbed_disc(double amplitude, int mode, double radius) {
  if (!(std::abs(amplitude) < 1)) throw PreconditionError("perturbed_disc: |amplitude| must be < 1");
  if (mode < 0) throw PreconditionError("perturbed_disc: mode must be >= 0");
  if (!(radius > 0)) throw PreconditionError("perturbed_disc: radius must be positive");
  return StarDomain(Point2::Zero(), PerturbedDiscShape{amplitude, mode, radius}, 1.0);
}

StarDomain StarDomain::regular_polygon(int sides, double circumradius) {
  if (sides < 3) throw PreconditionError("regular_polygon: need at least 3 sides");
  if (!(circumradius > 0)) throw PreconditionError("regular_polygon: radius must be positive");
  return StarDomain(Point2::Zero(), RegularPolygonShape{sides, circumradius}, 1.0);
}

StarDomain StarDomain::sampled(std::vector<double> samples) {
  return StarDomain(Point2::Zero(), make_sampled(std::move(samples)), 1.0);
}

StarDomain StarDomain::translated(const Point2& shift) const {
  return StarDomain(center_ + shift, shape_, scale_);
}

StarDomain StarDomain::scaled(double factor) const {
  return StarDomain(center_, shape_, scale_ * factor);
}

StarDomain StarDomain::rotated_samples(int steps) const {
  const auto* s = std::get_if<SampledShape>(&shape_);
  if (!s) throw PreconditionError("rotated_samples: domain is not sampled");
  const int n = static_cast<int>(s->samples.size());
  std::vector<double> rotated(n);
  for (int j = 0; j < n; ++j) rotated[((j + steps) % n + n) % n] = s->samples[j];
  return StarDomain(center_, make_sampled(std::move(rotated)), scale_);
}

double StarDomain::radius(double theta) const {
  const double r = std::visit(
      overloaded{
          [](const DiscShape& s) { return s.radius; },
          [&](const EllipseShape& s) {
            const double k = ellipse_semi_axis_scale(s);
            const double a = (1 + s.eps) * k, b = (1 - s.eps) * k;
            const double c = std::cos(theta), sn = std::sin(theta);
            return a * b / std::sqrt(b * b * c * c + a * a * sn * sn);
          },
          [&](const PerturbedDiscShape& s) { return s.radius * (1 + s.amplitude * std::cos(s.mode * theta)); },
          [&](const RegularPolygonShape& s) {
            const double sector = kTwoPi / s.sides;
            const double phi = std::fmod(wrap_angle(theta), sector) - sector / 2;
            return s.circumradius * std::cos(kPi / s.sides) / std::cos(phi);
          },
          [&](const SampledShape& s) { return sampled_value(s, theta); },
      },
      shape_);
  return scale_ * r;
}

double StarDomain::radius_derivative(double theta) const {
  const double dr = std::visit(
      overloaded{
          [](const DiscShape&) { return 0.0; },
          [&](const EllipseShape& s) {
            const double k = ellipse_semi_axis_scale(s);
            const double a = (1 + s.eps) * k, b = (1 - s.eps) * k;
            const double c = std::cos(theta), sn = std::sin(theta);
            const double q = b * b * c * c + a * a * sn * sn;
            return -a * b * (a * a - b * b) * sn * c / (q * std::sqrt(q));
          },
          [&](const PerturbedDiscShape& s) {
            return -s.radius * s.amplitude * s.mode * std::sin(s.mode * theta);
          },
          [&](const RegularPolygonShape& s) {
            const double sector = kTwoPi / s.sides;
            const double phi = std::fmod(wrap_angle(theta), sector) - sector / 2;
            const double c = std::cos(phi);
            return s.circumradius * std::cos(kPi / s.sides) * std::sin(phi) / (c * c);
          },
          [&](const SampledShape& s) { return sampled_derivative(s, theta); },
      },
      shape_);
  return scale_ * dr;
}

bool StarDomain::contains(const Point2& p) const {
  const Point2 v = p - center_;
  const double t = v.norm();
  if (t == 0) return true;
  return t < radius(std::atan2(v.y(), v.x()));
}

std::vector<double> StarDomain::kink_angles() const {
  std::vector<double> out;
  if (const auto* p = std::get_if<RegularPolygonShape>(&shape_)) {
    for (int k = 0; k < p->sides; ++k) out.push_back(kTwoPi * k / p->sides);
  }
  return out;
}

double StarDomain::max_radius() const {
  const double r = std::visit(
      overloaded{
          [](const DiscShape& s) { return s.radius; },
          [](const EllipseShape& s) { return (1 + s.eps) * ellipse_semi_axis_scale(s); },
          [](const PerturbedDiscShape& s) { return s.radius * (1 + std::abs(s.amplitude)); },
          [](const RegularPolygonShape& s) { return s.circumradius; },
          [](const SampledShape& s) {
            double bound = s.cos_coeffs[0];
            for (std::size_t k = 1; k < s.cos_coeffs.size(); ++k) bound += std::hypot(s.cos_coeffs[k], s.sin_coeffs[k]);
            return bound;
          },
      },
      shape_);
  return scale_ * r;
}

std::string StarDomain::spec() const {
  std::string base = std::visit(
      overloaded{
          [](const DiscShape& s) { return "disc(" + format_number(s.radius) + ")"; },
          [](const EllipseShape& s) {
            return "ellipse(" + format_number(s.eps) + "," + (s.normalized ? "normalized" : "raw") + ")";
          },
          [](const PerturbedDiscShape& s) {
            std::string out = "perturbed_disc(" + format_number(s.amplitude) + "," + std::to_string(s.mode);
            if (s.radius != 1.0) out += "," + format_number(s.radius);
            return out + ")";
          },
          [](const RegularPolygonShape& s) {
            return "regular_polygon(" + std::to_string(s.sides) + "," + format_number(s.circumradius) + ")";
          },
          [](const SampledShape& s) { return "sampled(" + std::to_string(s.samples.size()) + ")"; },
      },
      shape_);
  if (scale_ != 1.0) base += "*" + format_number(scale_);
  if (center_ != Point2::Zero()) base += "@(" + format_number(center_.x()) + "," + format_number(center_.y()) + ")";
  return base;
}

StarDomain parse_domain(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw ConfigError("domain '" + text + "': expected name(args)");
  const std::string name = s.substr(0, open);
  std::vector<std::string> args;
  std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
  for (std::string item; std::getline(ss, item, ',');) args.push_back(item);

  auto number = [&](std::size_t i) {
    if (i >= args.size()) throw ConfigError("domain '" + text + "': missing argument");
    try {
      std::size_t used = 0;
      const double v = std::stod(args[i], &used);
      if (used != args[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("domain '" + text + "': bad number '" + args[i] + "'");
    }
  };
  auto integer = [&](std::size_t i) {
    const double v = number(i);
    if (v != std::floor(v)) throw ConfigError("domain '" + text + "': expected an integer");
    return static_cast<int>(v);
  };

  try {
    if (name == "disc" && args.size() == 1) return StarDomain::disc(number(0));
    if (name == "ellipse" && (args.size() == 1 || args.size() == 2)) {
      bool normalized = true;
      if (args.size() == 2) {
        if (args[1] == "normalized" || args[1] == "true") normalized = true;
        else if (args[1] == "raw" || args[1] == "false") normalized = false;
        else throw ConfigError("domain '" + text + "': ellipse flag must be normalized|raw");
      }
      return StarDomain::ellipse(number(0), normalized);
    }
    if (name == "perturbed_disc" && (args.size() == 2 || args.size() == 3))
      return StarDomain::perturbed_disc(number(0), integer(1), args.size() == 3 ? number(2) : 1.0);
    if (name == "regular_polygon" && args.size() == 2) return StarDomain::regular_polygon(integer(0), number(1));
  } catch (const PreconditionError& e) {
    throw ConfigError("domain '" + text + "': " + e.what());
  }
  throw ConfigError("domain '" + text + "': unknown shape or wrong argument count");
}

double area(const StarDomain& d) {
  const double scale = d.max_radius() * d.max_radius();
  auto f = [&](double th) {
    const double r = d.radius(th);
    return 0.5 * r * r;
  };
  return integrate_piecewise(f, quadrature_breaks(d, 16), 1e-13 * scale);
}

double perimeter(const StarDomain& d) {
  auto f = [&](double th) { return std::hypot(d.radius(th), d.radius_derivative(th)); };
  return integrate_piecewise(f, quadrature_breaks(d, 16), 1e-13 * d.max_radius());
}

Point2 centroid(const StarDomain& d) {
  const double a = area(d);
  const double scale = std::pow(d.max_radius(), 3);
  const auto breaks = quadrature_breaks(d, 16);
  auto mx = [&](double th) { return std::pow(d.radius(th), 3) / 3 * std::cos(th); };
  auto my = [&](double th) { return std::pow(d.radius(th), 3) / 3 * std::sin(th); };
  return d.center() + Point2(integrate_piecewise(mx, breaks, 1e-13 * scale), integrate_piecewise(my, breaks, 1e-13 * scale)) / a;
}

double equal_volume_ball_radius(const StarDomain& d) { return std::sqrt(area(d) / kPi); }

double symdiff_volume(const StarDomain& d, const Point2& ball_center, double ball_radius, int resolution) {
  if (resolution < 64) throw PreconditionError("symdiff_volume: resolution must be >= 64");
  if (!(ball_radius > 0)) throw PreconditionError("symdiff_volume: ball radius must be positive");
  const double reach = d.max_radius() * (1 + 1e-9);
  const Point2 lo = (d.center().array() - reach).min(ball_center.array() - ball_radius);
  const Point2 hi = (d.center().array() + reach).max(ball_center.array() + ball_radius);
  const double r2 = ball_radius * ball_radius;

  auto estimate = [&](int n) {
    const double hx = (hi.x() - lo.x()) / n, hy = (hi.y() - lo.y()) / n;
    long long count = 0;
    for (int i = 0; i < n; ++i) {
      const double x = lo.x() + (i + 0.5) * hx;
      for (int j = 0; j < n; ++j) {
        const Point2 p(x, lo.y() + (j + 0.5) * hy);
        const bool in_ball = (p - ball_center).squaredNorm() < r2;
        if (in_ball != d.contains(p)) ++count;
      }
    }
    return count * hx * hy;
  };

  const double target = 1e-4 * kPi * r2;
  constexpr int kMaxResolution = 8192;
  double prev = estimate(resolution);
  for (int n = 2 * resolution; n <= kMaxResolution; n *= 2) {
    const double cur = estimate(n);
    if (std::abs(cur - prev) <= target) return cur;
    prev = cur;
  }
  throw NumericError("symdiff_volume: no convergence at maximum resolution", prev);
}

double symdiff_volume_polar(const StarDomain& d, const Point2& ball_center, double ball_radius) {
  if (!(ball_radius > 0)) throw PreconditionError("symdiff_volume_polar: ball radius must be positive");
  const Point2 w = d.center() - ball_center;
  const double w2 = w.squaredNorm();
  const double r2 = ball_radius * ball_radius;

  // Along the ray center + t e, the domain is [0, r(th)) and the ball is [t1, t2].
  auto overlap = [&](double th) {
    const double bw = std::cos(th) * w.x() + std::sin(th) * w.y();
    const double disc = bw * bw - (w2 - r2);
    if (disc <= 0) return 0.0;
    const double sq = std::sqrt(disc);
    const double a = std::max(0.0, -bw - sq);
    const double b = std::min(d.radius(th), -bw + sq);
    return b > a ? 0.5 * (b * b - a * a) : 0.0;
  };

  auto breaks = quadrature_breaks(d, 32);
  if (w2 > r2) {
    const double base = std::atan2(-w.y(), -w.x());
    const double half = std::asin(ball_radius / std::sqrt(w2));
    breaks.push_back(wrap_angle(base - half));
    breaks.push_back(wrap_angle(base + half));
    std::sort(breaks.begin(), breaks.end());
  }
  const double scale = std::max(d.max_radius() * d.max_radius(), r2);
  const double both = integrate_piecewise(overlap, breaks, 1e-12 * scale);
  return std::max(0.0, area(d) + kPi * r2 - 2 * both);
}

namespace {

double unit_from_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

AsymmetryResult fraenkel_asymmetry(const StarDomain& d, const AsymmetryOptions& options) {
  const double a = area(d);
  const double r_eq = std::sqrt(a / kPi);
  // Work relative to the domain center so translations do not change the arithmetic.
  const StarDomain local = d.translated(-d.center());
  auto objective = [&](const Point2& z) { return symdiff_volume_polar(local, z, r_eq) / a; };

  const Point2 start = centroid(local);
  std::vector<Point2> starts{start};
  const double phase = 0.5 * kPi * unit_from_seed(options.seed);
  for (int k = 0; k < 4; ++k) {
    const double ang = phase + 0.5 * kPi * k;
    starts.push_back(start + 0.25 * r_eq * Point2(std::cos(ang), std::sin(ang)));
  }

  AsymmetryResult res;
  res.ball_radius = r_eq;
  res.value = std::numeric_limits<double>::infinity();
  constexpr double kTie = 1e-12;
  for (const Point2& s : starts) {
    const SimplexResult sr = nelder_mead(objective, s, 0.1 * r_eq, options.simplex_tolerance * r_eq, options.max_iterations);
    res.evaluations += sr.evaluations;
    if (!sr.converged) res.flagged = true;
    const bool better = sr.value < res.value - kTie;
    const bool tie = std::abs(sr.value - res.value) <= kTie;
    const bool lex_smaller = std::tie(sr.x.x(), sr.x.y()) < std::tie(res.optimal_center.x(), res.optimal_center.y());
    if (better || (tie && lex_smaller)) {
      res.value = better ? sr.value : std::min(res.value, sr.value);
      res.optimal_center = sr.x;
    }
  }
  res.optimal_center += d.center();
  return res;
}

IsoperimetricRecord isoperimetric_checks(const StarDomain& d, const AsymmetryOptions& options) {
  const double r_eq = equal_volume_ball_radius(d);
  const double deficit = perimeter(d) - 2 * kPi * r_eq;
  const double asym = fraenkel_asymmetry(d, options).value;
  const double ratio = asym > 0 ? deficit / (asym * asym) : std::numeric_limits<double>::infinity();
  return {deficit, asym, ratio};
}

}  // namespace fk
