// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace dppci::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorKind::ParseError, what);
}

MatrixXd from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) parse_error("matrix has no rows");
  const auto n = rows.size();
  MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      parse_error("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                  " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) parse_error("non-finite matrix entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace

MatrixXd parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    std::vector<double> row;
    std::size_t pos = 0;
    bool expect_value = false;  // set after a comma
    while (pos < line.size()) {
      const char ch = line[pos];
      if (ch == ' ' || ch == '\t' || ch == '\r') {
        ++pos;
        continue;
      }
      if (ch == ',') {
        if (row.empty() || expect_value) {
          parse_error("empty field on line " + std::to_string(line_no));
        }
        expect_value = true;
        ++pos;
        continue;
      }
      double value = 0.0;
      const char* first = line.data() + pos;
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, line.data() + line.size(), value);
      if (ec != std::errc() || ptr == first) {
        parse_error("bad number on line " + std::to_string(line_no));
      }
      row.push_back(value);
      expect_value = false;
      pos = static_cast<std::size_t>(ptr - line.data());
      if (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])) &&
          line[pos] != ',') {
        parse_error("bad number on line " + std::to_string(line_no));
      }
    }
    if (expect_value) parse_error("trailing comma on line " + std::to_string(line_no));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

MatrixXd parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("rows")) {
    parse_error("JSON matrix needs fields \"n\" and \"rows\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
    parse_error("\"n\" must be a positive integer");
  }
  const auto n = doc["n"].get<std::size_t>();
  const auto& rows_json = doc["rows"];
  if (!rows_json.is_array() || rows_json.size() != n) {
    parse_error("\"rows\" must be an array of n rows");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& r : rows_json) {
    if (!r.is_array()) parse_error("each row must be an array");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) parse_error("matrix entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

MatrixXd parse_matrix(std::string_view text, MatrixFormat format, std::string_view path) {
  if (format == MatrixFormat::Auto) {
    const bool json_ext = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool brace = first != std::string_view::npos && text[first] == '{';
    format = (json_ext || brace) ? MatrixFormat::Json : MatrixFormat::Csv;
  }
  return format == MatrixFormat::Json ? parse_json(text) : parse_csv(text);
}

MatrixXd read_matrix_file(const std::string& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix(buffer.str(), format, path);
}

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep the value recognizable as floating point.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write(std::ostringstream& os, const nlohmann::ordered_json& v, int indent, int depth) {
  const std::string pad =
      indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad =
      indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case nlohmann::ordered_json::value_t::number_float:
      os << format_double(v.get<double>());
      break;
    case nlohmann::ordered_json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        break;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << nlohmann::ordered_json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      break;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        break;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const auto& e) {
        return !e.is_structured();
      });
      os << '[' << (flat ? "" : nl);
      bool first = true;
      for (const auto& e : v) {
        if (!first) os << ',' << (flat ? (indent > 0 ? " " : "") : nl);
        first = false;
        if (!flat) os << pad;
        write(os, e, indent, depth + 1);
      }
      os << (flat ? "" : nl) << (flat ? "" : close_pad) << ']';
      break;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::ostringstream os;
  write(os, value, indent, 0);
  return os.str();
}

}  // namespace dppci::io
