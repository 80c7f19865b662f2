#pragma once

#include <string>
#include <vector>

#include "fk/lab/config.hpp"
#include "fk/lab/report.hpp"

namespace fk::lab {

/// Everything the corpus experiments know about one (domain, beta) pair.
struct DomainRecord {
  std::string domain;
  bool is_disc = false;
  double beta = 0;
  double area = 0;
  double perimeter = 0;
  double ball_radius = 0;
  double lambda = 0;  // extrapolated FEM value
  double lambda_ball = 0;
  double deficit = 0;
  double error_estimate = 0;
  double asymmetry = 0;
  bool asymmetry_flagged = false;
  double u_min = 0;
  double perimeter_deficit = 0;
  double step2_lhs = 0;
  double step2_rhs = 0;
  double ratio = 0;  // deficit / asymmetry^2, NaN on discs
  double observed_order = 0;
  bool monotone = true;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Domain-major, beta-minor, in config order. Numeric failures are recorded
/// in `status` and the remaining rows are still computed.
std::vector<DomainRecord> compute_domain_records(const std::vector<std::string>& domains,
                                                 const std::vector<double>& betas, const ExperimentConfig& cfg);

struct LineFit {
  double slope;
  double intercept;
  double residual;  // root mean square of the residuals
};

/// Least-squares line through (log x, log y).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SharpnessFit {
  double beta;
  std::vector<double> eps;
  std::vector<double> asymmetry;
  std::vector<double> deficit;
  std::vector<double> error_estimate;
  LineFit asym_fit;
  LineFit deficit_fit;
  LineFit deficit_vs_asym_fit;
  double ratio_min;
  double ratio_max;
};

std::vector<SharpnessFit> sharpness_fits(const ExperimentConfig& cfg);

/// Empirical uniform-convexity constant of r -> lambda(B_r) + k|B_r| on
/// [r_lo, r_hi]: the smallest second difference on an n-point grid.
double penalized_convexity_constant(int dim, double beta, double k, double r_lo, double r_hi, int n = 41);

Report cmd_balls(const ExperimentConfig& cfg);
Report cmd_fk_corpus(const ExperimentConfig& cfg);
Report cmd_step2_check(const ExperimentConfig& cfg);
Report cmd_sharpness(const ExperimentConfig& cfg);
Report cmd_step3_chain(const ExperimentConfig& cfg);

/// Dispatches on "balls", "fk-corpus", "step2", "sharpness" or "step3".
Report run_command(const std::string& command, const ExperimentConfig& cfg);

}  // namespace fk::lab
