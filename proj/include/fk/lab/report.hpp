#pragma once

// Tabular experiment reports with CSV and JSON writers. Output depends only
// on the report contents, so equal reports serialize to identical bytes.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace fk::lab {

using Cell = std::variant<double, long long, bool, std::string>;

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  bool numeric_failure = false;  // some row could not be computed

  void add_row(std::vector<Cell> row);
  void add_summary(std::string key, Cell value) { summary.emplace_back(std::move(key), std::move(value)); }
  void check(std::string name, bool passed, std::string detail = {});
  bool all_passed() const;
  /// 0 when every check passes, 3 after a numeric failure, otherwise 1.
  int exit_code() const;
};

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

void write_csv(std::ostream& os, const Report& report);
void write_json(std::ostream& os, const Report& report);
void write_report(std::ostream& os, const Report& report, const std::string& format);

}  // namespace fk::lab
