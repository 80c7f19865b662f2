// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fk/ball_spectrum.hpp"
#include "fk/lab/config.hpp"
#include "fk/lab/experiments.hpp"
#include "fk/robin_fem.hpp"
#include "fk/specfun.hpp"

#ifndef FK_CONFIG_DIR
#define FK_CONFIG_DIR "configs"
#endif

using namespace fk;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double j01 = 2.40482555769577276862;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_seconds) {
    out.passed = false;
    out.detail += fmt("; over the %.0f s budget", budget_seconds);
  }
  if (!out.passed) ++failures;
  std::printf("criterion %2d %s  %s: %s [%.2f s]\n", id, out.passed ? "PASS" : "FAIL", name, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::vector<lab::DomainRecord> corpus_records;

}  // namespace

int main() {
  criterion(1, "Bessel accuracy", 1, [] {
    double rec = 0, half = 0;
    for (int i = 0; i < 500; ++i) {
      const double x = 0.1 + (50 - 0.1) * i / 499;
      for (double nu : {0.0, 1.0})
        rec = std::max(rec, std::abs(bessel_j(nu - 1, x) + bessel_j(nu + 1, x) - (2.0 * nu / x) * bessel_j(nu, x)));
      const double c = std::sqrt(2 / (pi * x));
      half = std::max(half, std::abs(bessel_j(0.5, x) - c * std::sin(x)));
      half = std::max(half, std::abs(bessel_j(1.5, x) - c * (std::sin(x) / x - std::cos(x))));
      half = std::max(half, std::abs(bessel_j(1.5, x) - std::cyl_bessel_j(1.5, x)));
    }
    return Outcome{rec <= 1e-9 && half <= 1e-12, fmt("max recurrence residual %.2e, half-integer error %.2e", rec, half)};
  });

  criterion(2, "ball eigenvalue exactness", 1, [] {
    double worst = 0;
    for (int dim : {2, 3})
      for (double beta : {1e-6, 1e-2, 0.5, 1.0, 5.0, 100.0, 1e6})
        for (double r : {0.1, 0.5, 1.0, 2.0, 5.0})
          worst = std::max(worst, robin_eigenvalue_ball(BallQuery<double>{dim, beta, r}).residual);
    const double dirichlet = robin_eigenvalue_ball(BallQuery<double>{2, 1e6, 1.0}).lambda;
    double neumann = 0;
    for (int dim : {2, 3}) {
      const double lam = robin_eigenvalue_ball(BallQuery<double>{dim, 1e-6, 1.0}).lambda;
      neumann = std::max(neumann, std::abs(lam / 1e-6 / dim - 1));  // P/|B| = N/r
    }
    const bool ok = worst <= 1e-10 && std::abs(dirichlet - j01 * j01) <= 1e-2 && neumann <= 0.01;
    return Outcome{ok, fmt("max |G| %.2e, |lambda - j01^2| %.2e, Neumann rel. error %.2e", worst,
                           std::abs(dirichlet - j01 * j01), neumann)};
  });

  criterion(3, "g' ODE consistency", 10, [] {
    double worst = 0, small = 0;
    for (int dim : {2, 3})
      for (double beta : {0.5, 1.0, 5.0}) {
        for (int i = 0; i <= 49; ++i) {
          const double r = 0.1 + (5 - 0.1) * i / 49;
          const double h = 1e-4 * r;
          const double fd = (g_value(BallQuery<double>{dim, beta, r + h}) - g_value(BallQuery<double>{dim, beta, r - h})) / (2 * h);
          const double ode = g_prime_ode(BallQuery<double>{dim, beta, r});
          worst = std::max(worst, std::abs(fd - ode) / std::abs(ode));
        }
        small = std::max(small, std::abs(g_value(BallQuery<double>{dim, beta, 1e-3}) / (dim * beta) - 1));
      }
    return Outcome{worst <= 1e-5 && small <= 0.01,
                   fmt("max relative FD mismatch %.2e, |g(0.001)/(N beta) - 1| max %.2e", worst, small)};
  });

  criterion(4, "convexity of g and uniform convexity", 10, [] {
    const std::vector<double> grid = lab::parse_real_list("0.1:0.05:5");
    int violations = 0;
    double uniform = std::numeric_limits<double>::infinity();
    for (int dim : {2, 3})
      for (double beta : {0.5, 1.0, 5.0}) {
        const double k_ball = penalized_k_for_volume(dim, beta, ball_volume(dim, 1.0));
        for (double k : {k_ball, 0.1, 1.0, 10.0}) {
          const auto scan = convexity_scan<double>(dim, beta, grid, k);
          if (k == k_ball) violations += scan.g_violations;
          uniform = std::min(uniform, scan.penalized_second_min);
        }
      }
    return Outcome{violations == 0 && uniform > 0,
                   fmt("%.0f nonpositive second differences of g, min penalized second difference %.4g", violations,
                       uniform)};
  });

  criterion(5, "H_B identity", 30, [] {
    double worst = 0;
    for (int dim : {2, 3})
      for (double beta : {0.5, 1.0, 5.0})
        for (double radius : {0.5, 1.0, 2.0}) {
          const BallQuery<double> q{dim, beta, radius};
          const double lam = robin_eigenvalue_ball(q).lambda;
          for (int i = 1; i <= 20; ++i) worst = std::max(worst, std::abs(hb_functional(q, radius * i / 21.0) - lam) / lam);
        }
    return Outcome{worst <= 1e-7, fmt("max |H_B - lambda| / lambda = %.2e", worst)};
  });

  criterion(6, "FEM convergence on the disc", 120, [] {
    const double exact = robin_eigenvalue_ball(BallQuery<double>{2, 1.0, 1.0}).lambda;
    RefinementOptions opts;
    opts.levels = 4;
    const Extrapolation ex = refine_and_extrapolate(StarDomain::disc(1), 1.0, opts);
    const auto& lv = ex.levels;
    const double order = std::log2((lv[2].lambda - exact) / (lv[3].lambda - exact));
    const double rel = std::abs(ex.lambda_extrapolated - exact) / exact;
    return Outcome{order >= 1.7 && order <= 2.3 && rel <= 1e-3,
                   fmt("order vs oracle %.3f (successive differences %.3f), extrapolated rel. error %.2e", order,
                       ex.observed_order, rel)};
  });

  criterion(7, "Faber-Krahn on the corpus", 600, [] {
    lab::ExperimentConfig cfg;
    cfg.betas = {0.5, 1.0, 5.0};
    corpus_records = lab::compute_domain_records(lab::standard_corpus(), cfg.betas, cfg);
    int bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : corpus_records) {
      const double margin = r.deficit + 3 * r.error_estimate;
      if (!r.ok() || !(margin >= 0)) ++bad;
      worst = std::min(worst, margin);
    }
    return Outcome{bad == 0 && corpus_records.size() == 39,
                   fmt("%.0f rows, %.0f violations, min deficit + 3 err = %.3e", double(corpus_records.size()), bad,
                       worst)};
  });

  criterion(8, "Step-2 inequality", 1, [] {
    int bad = 0;
    bool disc_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : corpus_records) {
      const double margin = r.step2_lhs - r.step2_rhs;
      if (!r.ok() || !(margin >= -3 * r.error_estimate)) ++bad;
      worst = std::min(worst, margin + 3 * r.error_estimate);
      if (r.is_disc) disc_ok = disc_ok && std::abs(margin) <= 3 * r.error_estimate;
    }
    return Outcome{!corpus_records.empty() && bad == 0 && disc_ok,
                   fmt("%.0f violations, min guarded margin %.3e, disc equality ", bad, worst) +
                       (disc_ok ? "holds" : "fails")};
  });

  criterion(9, "sharpness exponents on the ellipse family", 300, [] {
    lab::ExperimentConfig cfg;
    cfg.betas = {1.0};
    cfg.eps = {0.05, 0.1, 0.15, 0.2};
    const auto fit = lab::sharpness_fits(cfg).front();
    const double pa = fit.asym_fit.slope, pd = fit.deficit_fit.slope;
    const bool ok = pa >= 1.9 && pa <= 2.1 && pd >= 1.8 && pd <= 2.2 && fit.ratio_max <= 4 * fit.ratio_min;
    return Outcome{ok, fmt("p_asym %.4f (target [1.9, 2.1]), p_deficit %.4f, ", pa, pd) +
                           fmt("deficit/A^2 in [%.4f, %.4f], p_deficit_vs_asym %.4f", fit.ratio_min, fit.ratio_max,
                               fit.deficit_vs_asym_fit.slope)};
  });

  criterion(10, "quantitative Faber-Krahn", 1, [] {
    double best = std::numeric_limits<double>::infinity();
    std::string where;
    for (const auto& r : corpus_records) {
      if (r.is_disc) continue;
      const double v = (r.deficit - 3 * r.error_estimate) / (r.asymmetry * r.asymmetry);
      if (!(v >= best)) {
        best = v;
        where = r.domain + fmt(" beta=%g", r.beta);
      }
    }
    return Outcome{!corpus_records.empty() && best > 0,
                   fmt("min (deficit - 3 err)/A^2 = %.4f at ", best) + where};
  });

  criterion(11, "determinism", 120, [] {
    int differing = 0;
    std::string which;
    for (const char* cmd : {"balls", "fk-corpus", "step2", "sharpness", "step3"}) {
      std::string file = cmd;
      for (char& c : file)
        if (c == '-') c = '_';
      lab::ExperimentConfig cfg = lab::load_config(std::string(FK_CONFIG_DIR) + "/" + file + ".cfg");
      cfg.seed = 12345;
      for (const char* format : {"csv", "json"}) {
        std::ostringstream a, b;
        lab::write_report(a, lab::run_command(cmd, cfg), format);
        lab::write_report(b, lab::run_command(cmd, cfg), format);
        if (a.str() != b.str() || a.str().empty()) {
          ++differing;
          which += std::string(" ") + cmd + "/" + format;
        }
      }
    }
    return Outcome{differing == 0, differing == 0 ? "all five commands byte-identical in csv and json"
                                                  : "reports differ:" + which};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
