#pragma once

#include <string>
#include <vector>

namespace tsvar {

/// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_number(double x);

/// Comma-separated table with a header row and LF line endings. Empty cells
/// are written as nothing between the commas.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: header plus rows of raw cells.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvData parse_csv(const std::string& text);
CsvData read_csv_file(const std::string& path);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace tsvar
