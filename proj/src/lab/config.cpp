#include "fk/lab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "fk/errors.hpp"
#include "fk/geometry.hpp"

namespace fk::lab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("expected a number, got an empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("not a finite number: '" + t + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) throw ConfigError("not an integer: '" + t + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("not an unsigned integer: '" + t + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError("seed out of range: '" + t + "'");
  return v;
}

int parse_int_in(const std::string& key, const std::string& text, int lo, int hi) {
  const long long v = parse_integer(text);
  if (v < lo || v > hi)
    throw ConfigError(key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return int(v);
}

void require_positive(const std::string& key, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError(key + ": empty list");
  for (double v : values) {
    if (!(v > 0)) throw ConfigError(key + ": values must be positive");
  }
}

}  // namespace

std::vector<std::string> standard_corpus() {
  std::vector<std::string> c{"disc(1)", "ellipse(0.1,normalized)", "ellipse(0.2,normalized)"};
  for (const char* a : {"0.03", "0.06"}) {
    for (int m : {2, 3, 4}) c.push_back(std::string("perturbed_disc(") + a + "," + std::to_string(m) + ")");
  }
  for (int n : {4, 5, 6, 8}) c.push_back("regular_polygon(" + std::to_string(n) + ",1)");
  return c;
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:step:stop, got '" + t + "'");
    const double a = parse_real(parts[0]), step = parse_real(parts[1]), b = parse_real(parts[2]);
    if (!(step > 0) || b < a) throw ConfigError("range needs step > 0 and stop >= start: '" + t + "'");
    const double count = std::floor((b - a) / step + 1e-9) + 1;
    if (count > 1e6) throw ConfigError("range has too many points: '" + t + "'");
    std::vector<double> out;
    for (long i = 0; i < long(count); ++i) out.push_back(a + double(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(t, ',')) out.push_back(parse_real(item));
  return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");

    try {
      if (key == "experiment") {
        cfg.experiment = value;
      } else if (key == "dimension") {
        cfg.dimensions.clear();
        for (const auto& item : split(value, ',')) cfg.dimensions.push_back(parse_int_in(key, item, 2, 3));
      } else if (key == "beta") {
        cfg.betas = parse_real_list(value);
        require_positive(key, cfg.betas);
      } else if (key == "domains") {
        for (const auto& item : split(value, ';')) {
          if (item == "corpus") {
            for (auto& s : standard_corpus()) cfg.domains.push_back(s);
          } else {
            cfg.domains.push_back(parse_domain(item).spec());
          }
        }
      } else if (key == "r_grid") {
        cfg.r_grid = parse_real_list(value);
        require_positive(key, cfg.r_grid);
        if (cfg.r_grid.size() < 3) throw ConfigError("r_grid needs at least 3 radii");
        for (std::size_t i = 1; i < cfg.r_grid.size(); ++i) {
          if (!(cfg.r_grid[i] > cfg.r_grid[i - 1])) throw ConfigError("r_grid must be increasing");
        }
      } else if (key == "volumes") {
        cfg.volumes = parse_real_list(value);
        require_positive(key, cfg.volumes);
      } else if (key == "eps") {
        cfg.eps = parse_real_list(value);
        for (double e : cfg.eps) {
          if (!(e > 0 && e < 1)) throw ConfigError("eps values must lie in (0, 1)");
        }
      } else if (key == "mesh_levels") {
        cfg.mesh_levels = parse_int_in(key, value, 3, 8);
      } else if (key == "base_rings") {
        cfg.base_rings = parse_int_in(key, value, 2, 256);
      } else if (key == "base_sectors") {
        cfg.base_sectors = parse_int_in(key, value, 8, 1024);
      } else if (key == "trial_volumes") {
        cfg.trial_volumes = parse_int_in(key, value, 2, 10000);
      } else if (key == "trial_min_fraction") {
        cfg.trial_min_fraction = parse_real(value);
        if (!(cfg.trial_min_fraction > 0 && cfg.trial_min_fraction < 1))
          throw ConfigError("trial_min_fraction must lie in (0, 1)");
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "format") {
        if (value != "csv" && value != "json") throw ConfigError("format must be csv or json");
        cfg.format = value;
      } else if (key == "seed") {
        cfg.seed = parse_u64(value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      throw ConfigError(msg.rfind(source, 0) == 0 ? msg : where + msg);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace fk::lab
