#pragma once

// Result records and their JSON / CSV renderings. Floats are printed with 17
// significant digits.

#include "ppqnd/cli/config.hpp"
#include "ppqnd/qnd_sim.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifndef PPQND_VERSION
#define PPQND_VERSION "0.0.0"
#endif

namespace ppqnd::cli {

inline constexpr const char* library_version = PPQND_VERSION;

using ordered = nlohmann::ordered_json;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<ordered>> rows;
};

enum class Status { Pass, Fail, Info };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Info:
      return "info";
  }
  return "?";
}

struct ResultRecord {
  std::string command;
  ExperimentConfig config;  // effective config, including defaulted seed
  Status status = Status::Info;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, ordered>> results;
  std::vector<Table> tables;

  void add(const std::string& key, ordered value) { results.emplace_back(key, std::move(value)); }
  int exit_code() const { return status == Status::Fail ? 2 : 0; }
};

inline ResultRecord start_record(std::string command, const ExperimentConfig& config) {
  ResultRecord r;
  r.command = std::move(command);
  r.config = config;
  return r;
}

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const ordered& j, int indent, int depth) {
  const std::string pad(std::size_t(indent * (depth + 1)), ' '), close(std::size_t(indent * depth), ' ');
  switch (j.type()) {
    case ordered::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    case ordered::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << ordered(k).dump() << ": ";
        write_json(os, v, indent, depth + 1);
      }
      os << '\n' << close << '}';
      return;
    }
    case ordered::value_t::array: {
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (j.empty() || flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << '\n' << close << ']';
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string csv_cell(const ordered& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + '"';
  }
  if (v.is_structured()) return csv_cell(ordered(v.dump()));
  return v.dump();
}

}  // namespace detail

inline std::string dump_json(const ordered& j) {
  std::ostringstream os;
  detail::write_json(os, j, 2, 0);
  return os.str();
}

inline ordered config_json(const ExperimentConfig& c) { return ordered::parse(to_json(c).dump()); }

inline ordered to_ordered(const ResultRecord& r) {
  ordered j = ordered::object();
  j["command"] = r.command;
  j["version"] = library_version;
  j["conventions"] = {{"evolution", evolution_convention}, {"quadrature", quadrature_convention}};
  j["config"] = config_json(r.config);
  j["status"] = status_name(r.status);
  j["tolerance"] = r.tolerance;
  ordered res = ordered::object();
  for (const auto& [k, v] : r.results) res[k] = v;
  j["results"] = res;
  ordered tabs = ordered::object();
  for (const auto& t : r.tables) {
    ordered rows = ordered::array();
    for (const auto& row : t.rows) rows.push_back(ordered(row));
    tabs[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  j["tables"] = tabs;
  return j;
}

inline std::string render_json(const ResultRecord& r) { return dump_json(to_ordered(r)) + "\n"; }

/// Header block of key,value lines, then one section per table.
inline std::string render_csv(const ResultRecord& r) {
  std::ostringstream os;
  os << "key,value\n";
  os << "command," << r.command << '\n';
  os << "version," << library_version << '\n';
  os << "evolution_convention," << detail::csv_cell(ordered(evolution_convention)) << '\n';
  os << "quadrature_convention," << detail::csv_cell(ordered(quadrature_convention)) << '\n';
  os << "config," << detail::csv_cell(ordered(to_json(r.config).dump())) << '\n';
  os << "status," << status_name(r.status) << '\n';
  os << "tolerance," << format_number(r.tolerance) << '\n';
  for (const auto& [k, v] : r.results) os << k << ',' << detail::csv_cell(v) << '\n';
  for (const auto& t : r.tables) {
    os << "\n# " << t.name << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::csv_cell(row[i]);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace ppqnd::cli
