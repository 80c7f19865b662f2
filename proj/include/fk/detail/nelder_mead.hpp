#pragma once

#include <algorithm>
#include <array>
#include <tuple>

namespace fk {

// Standard coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
// Stops when every vertex lies within `tolerance` of the best one.
template <typename F>
SimplexResult nelder_mead(F&& f, const Point2& start, double step, double tolerance, int max_iterations) {
  std::array<Point2, 3> x{start, start + Point2(step, 0), start + Point2(0, step)};
  std::array<double, 3> v{f(x[0]), f(x[1]), f(x[2])};
  int evaluations = 3;

  auto order = [&] {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (v[a] != v[b]) return v[a] < v[b];
      return std::tie(x[a].x(), x[a].y()) < std::tie(x[b].x(), x[b].y());
    });
    x = {x[idx[0]], x[idx[1]], x[idx[2]]};
    v = {v[idx[0]], v[idx[1]], v[idx[2]]};
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    order();
    const double diameter = std::max((x[1] - x[0]).norm(), (x[2] - x[0]).norm());
    if (diameter <= tolerance) return {x[0], v[0], evaluations, true};

    const Point2 centroid = 0.5 * (x[0] + x[1]);
    const Point2 reflected = centroid + (centroid - x[2]);
    const double fr = f(reflected);
    ++evaluations;
    if (fr < v[0]) {
      const Point2 expanded = centroid + 2.0 * (centroid - x[2]);
      const double fe = f(expanded);
      ++evaluations;
      if (fe < fr) {
        x[2] = expanded;
        v[2] = fe;
      } else {
        x[2] = reflected;
        v[2] = fr;
      }
      continue;
    }
    if (fr < v[1]) {
      x[2] = reflected;
      v[2] = fr;
      continue;
    }
    const bool outside = fr < v[2];
    const Point2 contracted = outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (x[2] - centroid);
    const double fc = f(contracted);
    ++evaluations;
    if (fc < (outside ? fr : v[2])) {
      x[2] = contracted;
      v[2] = fc;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      x[i] = x[0] + 0.5 * (x[i] - x[0]);
      v[i] = f(x[i]);
      ++evaluations;
    }
  }
  order();
  return {x[0], v[0], evaluations, false};
}

}  // namespace fk
