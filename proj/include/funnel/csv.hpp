#pragma once

#include "funnel/common.hpp"
#include "funnel/expr.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace funnel {

// Minimal CSV: comma separator, one header row, numeric cells written in
// shortest round-trip form so rewriting a loaded table is byte-identical.
class CsvWriter {
public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& cells);

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long v) { return std::to_string(v); }

private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::filesystem::path path_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Cell as a double; throws ValidationError for non-numeric content.
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::filesystem::path& path);

} // namespace funnel
