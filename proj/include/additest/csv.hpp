#pragma once

#include <string>
#include <vector>

#include "additest/tree.hpp"

namespace additest {

/// A parsed CSV: all columns in file order, still unsplit into
/// features/response.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<double> values;  // rows x columns, row-major
  std::size_t rows = 0;

  double value(std::size_t row, std::size_t col) const {
    return values[row * columns.size() + col];
  }
  /// Throws with the column name when it does not exist.
  std::size_t column_index(const std::string& name) const;
};

/// Reads an RFC-4180-style CSV with a header row and a fully numeric body.
/// Errors name the offending cell by row and column.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvTable& table);

/// Splits a table into a Dataset. `response` selects the response column by
/// name (empty = last column); `feature_columns` selects and orders the
/// feature columns (empty = every non-response column in file order).
struct DatasetWithNames {
  Dataset data;
  std::vector<std::string> feature_names;
  std::string response_name;
};
DatasetWithNames split_table(const CsvTable& table, const std::string& response,
                             const std::vector<std::string>& feature_columns);

/// read_csv + split with the default all-features selection.
DatasetWithNames ingest_csv(const std::string& path,
                            const std::string& response = "");

CsvTable to_table(const Dataset& data,
                  const std::vector<std::string>& feature_names,
                  const std::string& response_name);

}  // namespace additest
