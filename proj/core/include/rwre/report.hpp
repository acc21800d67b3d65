#pragma once

// Machine-readable experiment output: a JSON summary with a provenance
// block, and CSV tables for per-sample rows.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rwre/stats.hpp"

namespace rwre {

struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  bool log_log = true;
  // Reference line of this slope through the first point; NaN for none.
  double guide_slope = std::numeric_limits<double>::quiet_NaN();
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct DiagnosticsReport {
  std::string subcommand;
  std::string family;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, Estimate>> estimates;
  std::vector<std::pair<std::string, TestReport>> tests;
  std::vector<Series> series;
  std::vector<Check> checks;
  // Standardized residuals for the histogram plot, if any.
  std::vector<double> residuals;

  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;

  void scalar(std::string name, double v) { scalars.emplace_back(std::move(name), v); }
  void estimate(std::string name, const Estimate& e) { estimates.emplace_back(std::move(name), e); }
  void test(std::string name, const TestReport& t) { tests.emplace_back(std::move(name), t); }
  void check(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
  bool all_checks_pass() const;

  // Keys appear in a fixed order; the wall-clock field is last so that
  // determinism comparisons can drop one line.
  std::string to_json() const;
};

const char* code_version();

// Comma-separated table with a header row; values use format_real.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& values);
  std::string text() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace rwre
