#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace gssh {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Doubles with 17 significant digits, ',' separator, header row, '\n' line ends.
std::string to_csv(const Table& t);
/// {"columns": [...], "rows": [[...], ...]}
std::string to_json_text(const Table& t);

/// Writes via a sibling temporary file and rename, so a failed run leaves no partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace gssh
