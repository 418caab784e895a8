#include "owlab/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "owlab/errors.hpp"

namespace owlab {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header) {
  for (const auto& h : header)
    if (h.find_first_of(",\n\r") != std::string::npos) throw PreconditionError("csv header cell contains a separator: " + h);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != header.size())
      throw PreconditionError("csv row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                              " cells, header has " + std::to_string(header.size()));
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

void emit_csv(const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header,
              const std::string& path) {
  std::ostringstream buf;
  write_csv(buf, rows, header);
  auto os = open_out(path);
  os << buf.str();
  if (!os.flush()) throw std::runtime_error("write failed for " + path);
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("csv: missing header");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw PreconditionError("csv: arity mismatch on line " + std::to_string(lineno));
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') throw PreconditionError("csv: non-numeric cell '" + c + "' on line " + std::to_string(lineno));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

void emit_summary(const std::vector<std::pair<std::string, std::string>>& entries, const std::string& path) {
  auto os = open_out(path);
  os << "key,value\n";
  for (const auto& [k, v] : entries) os << k << ',' << v << '\n';
  if (!os.flush()) throw std::runtime_error("write failed for " + path);
}

}  // namespace owlab
