#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mrcsir::cli {

/// An empty cell is written as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);
  /// Stable lexicographic sort on the given column indices.
  void sort_by(const std::vector<std::size_t>& keys);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite).
std::string format_number(double v);

std::string to_csv(const Table& t);
/// {"meta": <meta_json>, "rows": [{column: value, ...}, ...]}; `meta_json`
/// must be a serialized JSON object.
std::string to_json(const Table& t, const std::string& meta_json);

/// Writes through a temporary file in the same directory and renames it over
/// `path`, so a failed run never leaves a partial file behind.
void write_atomic(const std::string& path, const std::string& content);

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out` when no --out file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrcsir::cli
