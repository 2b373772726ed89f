#include "otcert/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace otcert {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument(fmt::format("row has {} fields, header has {}", row.size(), header_.size()));
  rows_.push_back(std::move(row));
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw std::out_of_range("no column named '" + name + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

const std::string& CsvTable::at(std::size_t row, const std::string& name) const { return rows_.at(row)[column(name)]; }

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& s = at(row, name);
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::invalid_argument(fmt::format("column '{}' row {} is not numeric: '{}'", name, row, s));
  }
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << str();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

CsvTable CsvTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvTable t;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      t.header_ = std::move(fields);
      first = false;
    } else {
      t.add_row(std::move(fields));
    }
  }
  return t;
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace otcert
