#include "rwre/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rwre/errors.hpp"
#include "rwre/text.hpp"

#ifndef RWRE_VERSION
#define RWRE_VERSION "0.0.0"
#endif

namespace rwre {

using Json = nlohmann::ordered_json;

const char* code_version() { return RWRE_VERSION; }

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  std::string s = os.str();
  return std::string(16 - s.size(), '0') + s;
}

}  // namespace

bool DiagnosticsReport::all_checks_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string DiagnosticsReport::to_json() const {
  Json j;
  j["subcommand"] = subcommand;
  j["family"] = family;
  Json s = Json::object();
  for (const auto& [k, v] : scalars) s[k] = number(v);
  j["scalars"] = s;
  Json e = Json::object();
  for (const auto& [k, v] : estimates) {
    e[k] = {{"value", number(v.value)}, {"lo", number(v.lo)}, {"hi", number(v.hi)}, {"n", v.n}};
  }
  j["estimates"] = e;
  Json t = Json::object();
  for (const auto& [k, v] : tests) {
    t[k] = {{"method", v.method},         {"null", v.null_description}, {"statistic", number(v.statistic)},
            {"p_value", number(v.p_value)}, {"n", v.n},                   {"inconclusive", v.inconclusive}};
  }
  j["tests"] = t;
  Json ser = Json::array();
  for (const auto& sr : series) {
    Json pts = Json::array();
    for (const auto& [x, y] : sr.points) pts.push_back({number(x), number(y)});
    ser.push_back({{"name", sr.name}, {"x", sr.x_label}, {"y", sr.y_label}, {"log_log", sr.log_log},
                   {"guide_slope", number(sr.guide_slope)}, {"points", pts}});
  }
  j["series"] = ser;
  Json ch = Json::array();
  for (const auto& c : checks) ch.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = ch;
  j["pass"] = all_checks_pass();
  j["provenance"] = {{"config_hash", hex(config_hash)},
                     {"seed", seed},
                     {"code_version", code_version()},
                     {"config", config_text}};
  j["wall_clock_seconds"] = number(wall_clock_seconds);
  return j.dump(2) + "\n";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw UsageError("csv table needs at least one column");
}

void CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) {
    if (std::abs(v) < 1e15 && v == std::floor(v)) {
      cells.push_back(std::to_string(static_cast<long long>(v)));
    } else {
      cells.push_back(format_real(v));
    }
  }
  row_text(cells);
}

void CsvTable::row_text(const std::vector<std::string>& values) {
  if (values.size() != header_.size()) throw UsageError("csv row width differs from header");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += values[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::text() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path);
  out << text();
}

}  // namespace rwre
