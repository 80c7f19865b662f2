#pragma once

// Experiment configuration: a flat "key = value" text format.
//
//   # comment
//   beta    = 0.5, 1, 5          list of reals
//   r_grid  = 0.1:0.05:5         inclusive range start:step:stop
//   domains = corpus; ellipse(0.3,normalized)
//
// Unknown or repeated keys are errors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fk::lab {

struct ExperimentConfig {
  std::string experiment;  // empty: any command
  std::vector<int> dimensions{2};
  std::vector<double> betas{1.0};
  std::vector<std::string> domains;  // canonical specs, "corpus" already expanded
  std::vector<double> r_grid;
  std::vector<double> volumes;
  std::vector<double> eps{0.05, 0.1, 0.15, 0.2};
  int mesh_levels = 5;
  int base_rings = 4;
  int base_sectors = 24;
  int trial_volumes = 11;
  double trial_min_fraction = 0.5;
  std::string output;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

/// The thirteen-domain reference corpus, in report order.
std::vector<std::string> standard_corpus();

std::vector<double> parse_real_list(const std::string& text);

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace fk::lab
