// Minimal CSV helpers for the flat tabular formats used by the pipeline.
// Fields never contain commas or quotes; readers report line numbers.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phseg {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CsvReader {
public:
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("cannot open CSV file: " + path);
  }

  // Reads the header row and checks it against the expected column names.
  void expect_header(const std::vector<std::string>& columns) {
    std::string line;
    if (!read_line(line))
      throw std::runtime_error(path_ + ": empty file, expected header row");
    const auto fields = split_csv_line(line);
    if (fields.size() < columns.size())
      fail("header has " + std::to_string(fields.size()) + " columns, expected at least " +
           std::to_string(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (fields[i] != columns[i])
        fail("header column " + std::to_string(i + 1) + " is '" + fields[i] + "', expected '" +
             columns[i] + "'");
    }
    header_ = fields;
  }

  std::vector<std::string> raw_header() {
    std::string line;
    if (!read_line(line))
      throw std::runtime_error(path_ + ": empty file, expected header row");
    header_ = split_csv_line(line);
    return header_;
  }

  bool next_row(std::vector<std::string>& fields, std::size_t min_cols, std::size_t max_cols) {
    std::string line;
    while (read_line(line)) {
      if (line.empty()) continue;
      fields = split_csv_line(line);
      if (fields.size() < min_cols || fields.size() > max_cols)
        fail("row has " + std::to_string(fields.size()) + " columns, expected " +
             (min_cols == max_cols ? std::to_string(min_cols)
                                   : std::to_string(min_cols) + ".." + std::to_string(max_cols)));
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

  double parse_double(const std::string& s, const std::string& what) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("cannot parse " + what + " from '" + s + "'");
    }
  }

  long parse_long(const std::string& s, const std::string& what) const {
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("cannot parse " + what + " from '" + s + "'");
    }
  }

private:
  bool read_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t line_no_ = 0;
};

}  // namespace phseg
