#pragma once

// Minimal CSV table used for every experiment output. Numbers are written
// with 17 significant digits so reruns are byte-identical and round-trip.

#include <cstddef>
#include <string>
#include <vector>

namespace otcert {

std::string format_number(double v);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void add_row(std::vector<std::string> row);
  /// Index of a named column; throws when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  const std::string& at(std::size_t row, const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;

  std::string str() const;
  void write(const std::string& path) const;
  static CsvTable parse(const std::string& text);
  static CsvTable read(const std::string& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace otcert
