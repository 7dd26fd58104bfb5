#include "tnsign/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tnsign {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns) {
  FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, Errc::io, "cannot open for writing: " + path);
  file_ = f;
  ncols_ = columns.size();
  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) header += ',';
    header += columns[i];
  }
  header += '\n';
  std::fputs(header.c_str(), f);
  std::fflush(f);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(static_cast<FILE*>(file_));
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  require(cells.size() == ncols_, Errc::argument, "row width does not match header");
  require(!finished_, Errc::argument, "writer already finished");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  std::fputs(line.c_str(), static_cast<FILE*>(file_));
  // flush per row so interrupted runs leave a valid prefix
  std::fflush(static_cast<FILE*>(file_));
}

void CsvWriter::finish() {
  if (finished_) return;
  std::fputs("# complete\n", static_cast<FILE*>(file_));
  std::fflush(static_cast<FILE*>(file_));
  finished_ = true;
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvWriter::num(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%" PRId64, v);
  return buf;
}

std::string CsvWriter::num(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
  return buf;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(Errc::format, "missing CSV column: " + name);
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  const std::string& s = cell(row, column);
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    fail(Errc::format, "non-numeric CSV cell: " + s);
  }
}

const std::string& CsvTable::cell(std::size_t row, const std::string& column) const {
  require(row < rows.size(), Errc::argument, "CSV row out of range");
  return rows[row][column_index(column)];
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("complete") != std::string::npos) table.complete = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (!have_header) {
      table.columns = std::move(cells);
      have_header = true;
    } else {
      require(cells.size() == table.columns.size(), Errc::format,
              "CSV row width does not match header in " + path);
      table.rows.push_back(std::move(cells));
    }
  }
  require(have_header, Errc::format, "CSV has no header: " + path);
  return table;
}

}  // namespace tnsign
