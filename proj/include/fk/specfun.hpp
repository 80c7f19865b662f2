#pragma once

// Bessel functions of the first kind for the orders the ball problem needs,
// bracketed scalar root finding and adaptive Gauss-Kronrod quadrature.
// Everything is templated on the scalar type so the ball solver can run in
// extended precision.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fk/errors.hpp"

namespace fk {

namespace detail {

template <typename Scalar>
bool is_integer_order(Scalar order) {
  return std::floor(order) == order;
}

// Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), nu >= 0.
template <typename Scalar>
Scalar bessel_j_series(Scalar nu, Scalar x) {
  using std::abs;
  const Scalar half = x / 2;
  const Scalar q = half * half;
  Scalar term = std::pow(half, nu) / std::tgamma(nu + 1);
  Scalar sum = term;
  Scalar largest = abs(term);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int k = 1; k < 500; ++k) {
    term *= -q / (Scalar(k) * (Scalar(k) + nu));
    sum += term;
    largest = std::max(largest, abs(term));
    if (abs(term) <= eps * Scalar(1e-3) * largest && Scalar(k) > half) break;
  }
  return sum;
}

// Miller's downward recurrence for J_n(x), n >= 0, normalized with
// J_0 + 2 sum_k J_2k = 1. Stable for every x > 0.
template <typename Scalar>
Scalar bessel_j_miller(int n, Scalar x) {
  const Scalar top = std::max<Scalar>(Scalar(n), std::ceil(x));
  int m = static_cast<int>(top + std::ceil(std::sqrt(Scalar(200) * top)) + 20);
  m += m % 2;
  const Scalar big = Scalar(1e250);
  const Scalar two_over_x = Scalar(2) / x;
  Scalar j_next = 0;  // J_{k+1}
  Scalar j_cur = Scalar(1e-30);  // J_k
  Scalar norm = 0;
  Scalar result = (m == n) ? j_cur : Scalar(0);
  for (int k = m; k > 0; --k) {
    const Scalar j_prev = Scalar(k) * two_over_x * j_cur - j_next;
    j_next = j_cur;
    j_cur = j_prev;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2 * j_cur;
    if (k - 1 == n) result = j_cur;
    if (std::abs(j_cur) > big) {
      j_cur /= big;
      j_next /= big;
      norm /= big;
      result /= big;
    }
  }
  norm += j_cur;
  return result / norm;
}

}  // namespace detail

/// J_order(x) for x >= 0. Integer orders (any sign) and the half-integer
/// orders 1/2 and 3/2 are supported; anything else is a domain error.
/// Absolute accuracy is ~1e-14 in double on [0, 100].
template <typename Scalar>
Scalar bessel_j(Scalar order, Scalar x) {
  if (!(x >= 0)) throw std::domain_error("bessel_j: negative or NaN argument");
  if (!std::isfinite(x)) throw std::domain_error("bessel_j: non-finite argument");

  if (detail::is_integer_order(order)) {
    const int n = static_cast<int>(std::abs(order));
    const Scalar sign = (order < 0 && n % 2 == 1) ? Scalar(-1) : Scalar(1);
    if (x == 0) return n == 0 ? Scalar(1) : Scalar(0);
    if (x <= Scalar(6)) return sign * detail::bessel_j_series(Scalar(n), x);
    return sign * detail::bessel_j_miller(n, x);
  }

  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (order == Scalar(0.5)) {
    if (x == 0) return 0;
    return std::sqrt(2 / (pi * x)) * std::sin(x);
  }
  if (order == Scalar(1.5)) {
    if (x == 0) return 0;
    // sin(x)/x - cos(x) cancels badly near the origin.
    if (x < Scalar(0.5)) return detail::bessel_j_series(Scalar(1.5), x);
    return std::sqrt(2 / (pi * x)) * (std::sin(x) / x - std::cos(x));
  }
  throw std::domain_error("bessel_j: unsupported order " + std::to_string(double(order)));
}

/// Sign-changing interval for find_root.
template <typename Scalar>
struct Bracket {
  Scalar lo;
  Scalar hi;
  Scalar f_lo;
  Scalar f_hi;

  void validate() const {
    if (!(lo < hi)) throw PreconditionError("bracket: lo must be < hi");
    const bool opposite = (f_lo < 0 && f_hi > 0) || (f_lo > 0 && f_hi < 0);
    if (!opposite) throw PreconditionError("bracket: end values must have strictly opposite signs");
  }
};

template <typename Scalar, typename F>
Bracket<Scalar> make_bracket(F&& f, Scalar lo, Scalar hi) {
  Bracket<Scalar> b{lo, hi, f(lo), f(hi)};
  if (!std::isfinite(b.f_lo) || !std::isfinite(b.f_hi))
    throw NumericError("make_bracket: non-finite function value");
  b.validate();
  return b;
}

/// Brent's method: inverse quadratic / secant steps guarded by bisection,
/// so the bracket is kept at every step. Stops once the bracket width is
/// at most `tol` (or an exact zero is hit).
template <typename Scalar, typename F>
Scalar find_root(F&& f, const Bracket<Scalar>& bracket, Scalar tol) {
  using std::abs;
  bracket.validate();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar a = bracket.lo, b = bracket.hi;
  Scalar fa = bracket.f_lo, fb = bracket.f_hi;
  Scalar c = a, fc = fa;
  Scalar d = b - a, e = d;

  for (int iter = 0; iter < 1000; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (abs(fc) < abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const Scalar tol1 = std::max(Scalar(0.5) * tol, 2 * eps * abs(b));
    const Scalar xm = Scalar(0.5) * (c - b);
    if (abs(xm) <= tol1 || fb == 0) return b;

    if (abs(e) >= tol1 && abs(fa) > abs(fb)) {
      const Scalar s = fb / fa;
      Scalar p, q;
      if (a == c) {
        p = 2 * xm * s;
        q = 1 - s;
      } else {
        const Scalar qa = fa / fc;
        const Scalar r = fb / fc;
        p = s * (2 * xm * qa * (qa - r) - (b - a) * (r - 1));
        q = (qa - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = abs(p);
      if (2 * p < std::min(3 * xm * q - abs(tol1 * q), abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericError("find_root: non-finite function value", double(b));
  }
  throw NumericError("find_root: iteration limit reached", double(b));
}

namespace detail {

template <typename Scalar>
struct KronrodRule {
  static constexpr std::array<long double, 8> nodes{
      0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
      0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
      0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
      0.207784955007898467600689403773245L, 0.0L};
  static constexpr std::array<long double, 8> kronrod_weights{
      0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
      0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
      0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
      0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static constexpr std::array<long double, 4> gauss_weights{
      0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
      0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};
};

// Returns (kronrod estimate, |kronrod - gauss|). All nodes are interior.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gauss_kronrod15(F& f, Scalar a, Scalar b) {
  using Rule = KronrodRule<Scalar>;
  const Scalar mid = Scalar(0.5) * (a + b);
  const Scalar half = Scalar(0.5) * (b - a);
  const Scalar f_mid = f(mid);
  Scalar kronrod = f_mid * Scalar(Rule::kronrod_weights[7]);
  Scalar gauss = f_mid * Scalar(Rule::gauss_weights[3]);
  for (int i = 0; i < 7; ++i) {
    const Scalar dx = half * Scalar(Rule::nodes[i]);
    const Scalar sum = f(mid - dx) + f(mid + dx);
    kronrod += Scalar(Rule::kronrod_weights[i]) * sum;
    if (i % 2 == 1) gauss += Scalar(Rule::gauss_weights[i / 2]) * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b] to absolute
/// tolerance `tol`: the panel with the largest error estimate is bisected
/// until the summed estimate drops below tol. Endpoints are never evaluated.
/// Throws NumericError (carrying the best estimate) when `max_panels` is hit.
template <typename Scalar, typename F>
Scalar integrate(F&& f, Scalar a, Scalar b, Scalar tol, int max_panels = 4000) {
  if (!(a <= b)) throw PreconditionError("integrate: requires a <= b");
  if (a == b) return 0;
  struct Panel {
    Scalar lo, hi, value, err;
  };
  auto evaluate = [&](Scalar lo, Scalar hi) {
    const auto [value, err] = detail::gauss_kronrod15(f, lo, hi);
    if (!std::isfinite(value)) throw NumericError("integrate: non-finite integrand");
    return Panel{lo, hi, value, err};
  };
  auto by_error = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  std::vector<Panel> heap{evaluate(a, b)};
  Scalar total_err = heap.front().err;
  while (total_err > tol) {
    if (static_cast<int>(heap.size()) >= max_panels) {
      Scalar best = 0;
      for (const Panel& p : heap) best += p.value;
      throw NumericError("integrate: maximum refinement reached", double(best));
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const Scalar mid = Scalar(0.5) * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      Scalar best = 0;
      for (const Panel& p : heap) best += p.value;
      throw NumericError("integrate: panel width underflow", double(best + worst.value));
    }
    for (const Panel& half : {evaluate(worst.lo, mid), evaluate(mid, worst.hi)}) {
      heap.push_back(half);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
    total_err = 0;
    for (const Panel& p : heap) total_err += p.err;
  }
  // Sum left to right so the result does not depend on heap layout.
  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  Scalar total = 0;
  for (const Panel& p : heap) total += p.value;
  return total;
}

/// Integrates over consecutive panels [breaks[i], breaks[i+1]], splitting the
/// tolerance by length. Useful when the integrand has known kinks.
template <typename Scalar, typename F>
Scalar integrate_piecewise(F&& f, const std::vector<Scalar>& breaks, Scalar tol) {
  if (breaks.size() < 2) return 0;
  const Scalar length = breaks.back() - breaks.front();
  Scalar total = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Scalar lo = breaks[i], hi = breaks[i + 1];
    if (hi <= lo) continue;
    total += integrate(f, lo, hi, tol * (hi - lo) / length);
  }
  return total;
}

}  // namespace fk
