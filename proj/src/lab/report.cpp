#include "fk/lab/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "fk/errors.hpp"

namespace fk::lab {

void Report::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw PreconditionError("report row width does not match the columns");
  rows.push_back(std::move(row));
}

void Report::check(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
}

bool Report::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

int Report::exit_code() const {
  if (numeric_failure) return 3;
  return all_passed() ? 0 : 1;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  } visitor;
  return std::visit(visitor, c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    // JSON has no non-finite numbers; keep the CSV spelling as a string.
    if (!std::isfinite(*d)) return format_real(*d);
    return *d;
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  if (const bool* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

}  // namespace

void write_csv(std::ostream& os, const Report& report) {
  os << "# fklab " << report.command << '\n';
  for (const auto& [key, value] : report.summary) os << "# " << key << " = " << cell_text(value) << '\n';
  for (const auto& c : report.checks) {
    os << "# check " << c.name << ": " << (c.passed ? "PASS" : "FAIL");
    if (!c.detail.empty()) os << " (" << c.detail << ')';
    os << '\n';
  }
  for (std::size_t i = 0; i < report.columns.size(); ++i) os << (i ? "," : "") << report.columns[i];
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
    os << '\n';
  }
}

void write_json(std::ostream& os, const Report& report) {
  nlohmann::ordered_json doc;
  doc["command"] = report.command;
  doc["columns"] = report.columns;
  auto& summary = doc["summary"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.summary) summary[key] = cell_json(value);
  auto& checks = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json record = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) record[report.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(record));
  }
  os << doc.dump(2) << '\n';
}

void write_report(std::ostream& os, const Report& report, const std::string& format) {
  if (format == "csv") {
    write_csv(os, report);
  } else if (format == "json") {
    write_json(os, report);
  } else {
    throw ConfigError("unknown output format '" + format + "'");
  }
}

}  // namespace fk::lab
