#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace owlab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// 12 significant digits.
std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header);
// Throws std::invalid_argument on arity mismatch and std::runtime_error on I/O failure.
void emit_csv(const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header,
              const std::string& path);

CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

// "key,value" lines under a "key,value" header.
void emit_summary(const std::vector<std::pair<std::string, std::string>>& entries, const std::string& path);

}  // namespace owlab
