#include "additest/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace additest {

namespace {

/// Splits one CSV record, honoring double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line,
                                      std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw std::runtime_error("csv: unterminated quote on line " +
                             std::to_string(line_number));
  }
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_cell(const std::string& raw, std::size_t row,
                  const std::string& column) {
  const std::string cell = trim(raw);
  if (!cell.empty()) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin + cell.size() && std::isfinite(v)) return v;
  }
  throw std::runtime_error("csv: value '" + cell + "' at data row " +
                           std::to_string(row + 1) + ", column '" + column +
                           "' is not a finite number");
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw std::runtime_error("csv: no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv: '" + path + "' is empty (header required)");
  }
  CsvTable table;
  for (const std::string& f : split_record(line, 1)) {
    table.columns.push_back(trim(f));
  }
  if (table.columns.empty()) {
    throw std::runtime_error("csv: '" + path + "' has an empty header");
  }

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, line_number);
    if (fields.size() != table.columns.size()) {
      throw std::runtime_error(
          "csv: line " + std::to_string(line_number) + " has " +
          std::to_string(fields.size()) + " fields, header has " +
          std::to_string(table.columns.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      table.values.push_back(parse_cell(fields[c], table.rows, table.columns[c]));
    }
    ++table.rows;
  }
  if (table.rows == 0) {
    throw std::runtime_error("csv: '" + path + "' has a header but no data rows");
  }
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", table.value(r, c));
      out << buf;
    }
    out << '\n';
  }
}

DatasetWithNames split_table(const CsvTable& table, const std::string& response,
                             const std::vector<std::string>& feature_columns) {
  const std::size_t response_col =
      response.empty() ? table.columns.size() - 1 : table.column_index(response);

  DatasetWithNames out;
  out.response_name = table.columns[response_col];

  std::vector<std::size_t> feature_cols;
  if (feature_columns.empty()) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c != response_col) feature_cols.push_back(c);
    }
  } else {
    for (const std::string& name : feature_columns) {
      const std::size_t c = table.column_index(name);
      if (c == response_col) {
        throw std::runtime_error("csv: column '" + name +
                                 "' is the response; it cannot be a feature");
      }
      feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) {
    throw std::runtime_error("csv: no feature columns left");
  }

  out.data.n = table.rows;
  out.data.d = feature_cols.size();
  out.data.features.resize(out.data.n * out.data.d);
  out.data.response.resize(out.data.n);
  for (std::size_t c : feature_cols) out.feature_names.push_back(table.columns[c]);
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      out.data.features[r * out.data.d + j] = table.value(r, feature_cols[j]);
    }
    out.data.response[r] = table.value(r, response_col);
  }
  validate_dataset(out.data);
  return out;
}

DatasetWithNames ingest_csv(const std::string& path, const std::string& response) {
  return split_table(read_csv(path), response, {});
}

CsvTable to_table(const Dataset& data,
                  const std::vector<std::string>& feature_names,
                  const std::string& response_name) {
  if (feature_names.size() != data.d) {
    throw std::invalid_argument("to_table: feature name count mismatch");
  }
  CsvTable table;
  table.columns = feature_names;
  table.columns.push_back(response_name);
  table.rows = data.n;
  table.values.reserve(data.n * (data.d + 1));
  for (std::size_t r = 0; r < data.n; ++r) {
    for (std::size_t j = 0; j < data.d; ++j) {
      table.values.push_back(data.feature(r, j));
    }
    table.values.push_back(data.response[r]);
  }
  return table;
}

}  // namespace additest
