#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "isomed/errors.hpp"
#include "isomed/summary.hpp"

namespace isomed {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline double parse_double(const std::string& s, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" +
                    s + "'");
  }
}

inline long parse_long(const std::string& s, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" +
                    s + "'");
  }
}

}  // namespace detail

/// Summary form: header `label,n,mean,sd`, first data row is the control.
/// The sd field may be empty for groups of size one.
inline DoseResponseData read_summary_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<GroupSummary> groups;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_csv_line(line);
    if (line_no == 1) continue;  // header checked by the caller
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() < 3 || fields.size() > 4)
      throw DataError("line " + std::to_string(line_no) +
                      ": expected label,n,mean,sd, got " + std::to_string(fields.size()) +
                      " fields");
    GroupSummary g;
    g.label = fields[0];
    g.n = detail::parse_long(fields[1], line_no, "sample size");
    g.mean = detail::parse_double(fields[2], line_no, "mean");
    if (fields.size() == 4 && !fields[3].empty())
      g.sd = detail::parse_double(fields[3], line_no, "sd");
    try {
      g.validate();
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    groups.push_back(std::move(g));
  }
  if (groups.size() < 2)
    throw DataError("summary data needs a control row plus at least one treatment row");
  GroupSummary control = groups.front();
  groups.erase(groups.begin());
  return make_dose_response(std::move(control), std::move(groups));
}

/// Raw form: header `group,value`, group 0 is the control.
inline DoseResponseData read_raw_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, double>> observations;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_csv_line(line);
    if (line_no == 1) continue;
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() != 2)
      throw DataError("line " + std::to_string(line_no) + ": expected group,value, got " +
                      std::to_string(fields.size()) + " fields");
    const long g = detail::parse_long(fields[0], line_no, "group index");
    const double v = detail::parse_double(fields[1], line_no, "value");
    if (g < 0)
      throw DataError("line " + std::to_string(line_no) + ": group index must be >= 0");
    observations.emplace_back(static_cast<int>(g), v);
  }
  return summarize_raw(observations);
}

/// Detects the format from the header line and parses accordingly.
inline DoseResponseData read_dose_response_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("line 1: empty input");
  const auto fields = detail::split_csv_line(header);
  std::string joined;
  for (std::size_t i = 0; i < fields.size(); ++i)
    joined += (i ? "," : "") + fields[i];
  std::stringstream rest;
  rest << header << "\n" << in.rdbuf();
  if (joined == "label,n,mean,sd") return read_summary_csv(rest);
  if (joined == "group,value") return read_raw_csv(rest);
  throw DataError("line 1: expected header 'label,n,mean,sd' or 'group,value', got '" + header +
                  "'");
}

inline DoseResponseData load_dose_response(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_dose_response_csv(in);
}

}  // namespace isomed
