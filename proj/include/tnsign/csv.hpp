#pragma once

#include <string>
#include <vector>

#include "tnsign/errors.hpp"

namespace tnsign {

// Minimal CSV with a header row; numbers are written with max_digits10 so a
// write/parse round trip is value-exact. Lines starting with '#' are
// comments; a trailing "# complete" line marks a finished run.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  void write_row(const std::vector<std::string>& cells);
  void finish();  // writes the completion marker
  static std::string num(double v);
  static std::string num(std::int64_t v);
  static std::string num(std::uint64_t v);

 private:
  void* file_ = nullptr;
  std::size_t ncols_ = 0;
  bool finished_ = false;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool complete = false;

  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace tnsign
