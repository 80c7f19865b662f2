// fklab: run one experiment and write its report.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration,
// 3 numeric failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include "fk/errors.hpp"
#include "fk/lab/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
};

int run(const std::string& command, const Options& opts) {
  fk::lab::ExperimentConfig cfg = fk::lab::load_config(opts.config);
  if (!opts.out.empty()) cfg.output = opts.out;
  if (!opts.format.empty()) cfg.format = opts.format;
  if (opts.seed) cfg.seed = *opts.seed;

  const fk::lab::Report report = fk::lab::run_command(command, cfg);
  if (cfg.output.empty() || cfg.output == "-") {
    fk::lab::write_report(std::cout, report, cfg.format);
  } else {
    std::ofstream os(cfg.output, std::ios::binary);
    if (!os) throw fk::ConfigError("cannot open output file '" + cfg.output + "'");
    fk::lab::write_report(os, report, cfg.format);
    if (!os) throw std::runtime_error("write to '" + cfg.output + "' failed");
  }
  for (const auto& c : report.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cerr << ": " << c.detail;
    std::cerr << '\n';
  }
  if (report.numeric_failure) std::cerr << "fklab: some rows failed numerically, see the status column\n";
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin Faber-Krahn experiments"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"balls", "fk-corpus", "step2", "sharpness", "step3"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "experiment config file")->required();
    sub->add_option("--out", opts.out, "output path (default: stdout)");
    sub->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", opts.seed, "seed for the asymmetry multistart");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const fk::ConfigError& e) {
    std::cerr << "fklab: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const fk::PreconditionError& e) {
    std::cerr << "fklab: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fklab: numeric failure: " << e.what() << '\n';
    return 3;
  }
}
